#include "kt/learning.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "kt/conditionals.hpp"
#include "kt/error.hpp"

namespace kt {
namespace {

// Dataset collapsed to (unique config, count); PLL is row-order invariant,
// and repeated configs are common once datasets get large.
struct Compressed {
  std::vector<Assignment> configs;
  std::vector<double> counts;
  double n = 0.0;
};

Compressed compress(const Dataset& data) {
  if (data.instances.empty())
    throw ContractError("learning: empty dataset");
  validate_dataset(data);
  std::vector<Assignment> sorted = data.instances;
  std::sort(sorted.begin(), sorted.end());
  Compressed c;
  c.n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    c.configs.push_back(sorted[i]);
    c.counts.push_back(static_cast<double>(j - i));
    i = j;
  }
  return c;
}

std::vector<Feature> with_weights(const Structure& structure,
                                  std::span<const double> weights) {
  if (weights.size() != structure.size())
    throw ContractError("learning: weight vector does not match structure");
  std::vector<Feature> feats;
  feats.reserve(structure.size());
  for (std::size_t i = 0; i < structure.size(); ++i)
    feats.push_back(structure.features[i].with_weight(weights[i]));
  return feats;
}

// Objective evaluator reused across optimizer iterations: the conditional
// index depends only on the literal sets, so it is built once and weights
// are swapped in place.
class PllEvaluator {
 public:
  PllEvaluator(const Structure& structure, const Dataset& data, double l2)
      : feats_(with_weights(structure, std::vector<double>(structure.size()))),
        lc_(data.schema, feats_),
        data_(compress(data)),
        l2_(l2) {}

  std::size_t n_weights() const { return feats_.size(); }

  void set_weights(std::span<const double> w) {
    for (std::size_t i = 0; i < feats_.size(); ++i)
      feats_[i] = feats_[i].with_weight(w[i]);
  }

  double value(std::span<const double> w) {
    set_weights(w);
    double total = 0.0;
    for (std::size_t r = 0; r < data_.configs.size(); ++r)
      total += data_.counts[r] * lc_.instance_pll(data_.configs[r]);
    return total / data_.n - 0.5 * l2_ * squared_norm(w);
  }

  /// Returns the objective and fills `grad` with its gradient.
  double value_grad(std::span<const double> w, std::span<double> grad) {
    set_weights(w);
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> scratch(feats_.size());
    double total = 0.0;
    for (std::size_t r = 0; r < data_.configs.size(); ++r) {
      std::fill(scratch.begin(), scratch.end(), 0.0);
      total += data_.counts[r] *
               lc_.instance_pll_grad(data_.configs[r], scratch);
      for (std::size_t i = 0; i < scratch.size(); ++i)
        grad[i] += data_.counts[r] * scratch[i];
    }
    for (std::size_t i = 0; i < grad.size(); ++i)
      grad[i] = grad[i] / data_.n - l2_ * w[i];
    return total / data_.n - 0.5 * l2_ * squared_norm(w);
  }

 private:
  static double squared_norm(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) s += x * x;
    return s;
  }

  std::vector<Feature> feats_;
  LocalConditionals lc_;
  Compressed data_;
  double l2_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_norm(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double pll_objective(const Structure& structure, std::span<const double> weights,
                     const Dataset& data, double l2) {
  PllEvaluator ev(structure, data, l2);
  return ev.value(weights);
}

std::vector<double> pll_gradient(const Structure& structure,
                                 std::span<const double> weights,
                                 const Dataset& data, double l2) {
  PllEvaluator ev(structure, data, l2);
  std::vector<double> grad(structure.size());
  ev.value_grad(weights, grad);
  return grad;
}

LogLinearModel learn_weights(const Structure& structure, const Dataset& data,
                             const LearnConfig& cfg) {
  const std::size_t n = structure.size();
  if (n == 0) {
    if (data.instances.empty()) throw ContractError("learning: empty dataset");
    return LogLinearModel(data.schema, {});
  }
  PllEvaluator ev(structure, data, cfg.l2_prior);

  // L-BFGS on -objective; all signs below are in maximization terms.
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  struct Pair {
    std::vector<double> s, y;  // step, gradient change (of -objective)
    double rho;
  };
  std::deque<Pair> memory;

  std::vector<double> w(n, 0.0), grad(n), next(n), next_grad(n);
  double f = ev.value_grad(w, grad);
  std::vector<double> best_w = w;
  double best_f = f;

  for (std::uint32_t iter = 0; iter < cfg.max_iters; ++iter) {
    if (max_norm(grad) < cfg.gradient_tolerance)
      return LogLinearModel(data.schema, with_weights(structure, w));

    // Two-loop recursion; q starts as the minimization gradient -grad.
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = -grad[i];
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& x : q) x *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, q);
      for (std::size_t i = 0; i < n; ++i)
        q[i] += (alpha[k] - beta) * memory[k].s[i];
    }
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];  // ascent direction

    double slope = dot(grad, dir);
    if (!(slope > 0.0)) {  // numerically unusable; fall back to steepest ascent
      memory.clear();
      dir = grad;
      slope = dot(grad, grad);
    }

    // Backtracking line search (Armijo on the ascent).
    double step = 1.0;
    double next_f = 0.0;
    bool accepted = false;
    while (step >= 1e-12) {
      for (std::size_t i = 0; i < n; ++i) next[i] = w[i] + step * dir[i];
      next_f = ev.value_grad(next, next_grad);
      if (std::isfinite(next_f) && next_f >= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = next[i] - w[i];
      pair.y[i] = grad[i] - next_grad[i];  // change in -objective gradient
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * std::sqrt(dot(pair.s, pair.s) * dot(pair.y, pair.y))) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > kMemory) memory.pop_front();
    }

    w.swap(next);
    grad.swap(next_grad);
    f = next_f;
    if (f > best_f) {
      best_f = f;
      best_w = w;
    }
  }

  if (max_norm(grad) < cfg.gradient_tolerance)
    return LogLinearModel(data.schema, with_weights(structure, w));
  throw ConvergenceError("learn_weights: iteration budget exhausted",
                         std::move(best_w), best_f);
}

namespace {

// One node of a per-variable probability-estimation tree. Rows index the
// compressed dataset.
struct TreeCounts {
  std::vector<double> per_value;
  double total = 0.0;
};

TreeCounts count_target(const Compressed& data, const std::vector<std::size_t>& rows,
                        std::uint32_t target, std::uint32_t d_target) {
  TreeCounts c;
  c.per_value.assign(d_target, 0.0);
  for (std::size_t r : rows) {
    c.per_value[data.configs[r][target]] += data.counts[r];
    c.total += data.counts[r];
  }
  return c;
}

// Smoothed multinomial log-likelihood of the node's target counts.
double leaf_score(const TreeCounts& c, double kappa) {
  const double denom = c.total + kappa * static_cast<double>(c.per_value.size());
  double ll = 0.0;
  for (double n_y : c.per_value)
    if (n_y > 0.0) ll += n_y * std::log((n_y + kappa) / denom);
  return ll;
}

struct DtslState {
  const Compressed& data;
  const Schema& schema;
  std::uint32_t target;
  std::uint32_t d_target;
  DtslParams params;
  std::vector<Feature>* out;
  std::set<std::vector<Literal>>* seen;
};

void emit_leaf(const DtslState& st, const std::vector<Literal>& path) {
  for (std::uint32_t y = 0; y < st.d_target; ++y) {
    std::vector<Literal> lits = path;
    lits.push_back({st.target, y});
    Feature f(std::move(lits), 0.0);
    if (st.seen->insert(f.literals()).second) st.out->push_back(std::move(f));
  }
}

void grow(const DtslState& st, const std::vector<std::size_t>& rows,
          std::vector<Literal>& path, std::vector<bool>& used) {
  const TreeCounts here = count_target(st.data, rows, st.target, st.d_target);
  std::int32_t best_var = -1;
  double best_gain = 0.0;
  if (here.total >= static_cast<double>(st.params.mincount)) {
    const double base = leaf_score(here, st.params.kappa);
    for (std::uint32_t v = 0; v < st.schema.size(); ++v) {
      if (v == st.target || used[v]) continue;
      const std::uint32_t d_v =
          static_cast<std::uint32_t>(st.schema.var(v).domain.size());
      std::vector<std::vector<std::size_t>> parts(d_v);
      for (std::size_t r : rows) parts[st.data.configs[r][v]].push_back(r);
      double split_ll = 0.0;
      for (const auto& part : parts)
        split_ll += leaf_score(
            count_target(st.data, part, st.target, st.d_target), st.params.kappa);
      const double gain = split_ll - base -
                          st.params.prior * static_cast<double>(d_v - 1) *
                              static_cast<double>(st.d_target - 1);
      if (gain > best_gain) {
        best_gain = gain;
        best_var = static_cast<std::int32_t>(v);
      }
    }
  }
  if (best_var < 0) {
    if (here.total > 0.0) emit_leaf(st, path);
    return;
  }
  const auto v = static_cast<std::uint32_t>(best_var);
  const auto d_v = static_cast<std::uint32_t>(st.schema.var(v).domain.size());
  std::vector<std::vector<std::size_t>> parts(d_v);
  for (std::size_t r : rows) parts[st.data.configs[r][v]].push_back(r);
  used[v] = true;
  for (std::uint32_t val = 0; val < d_v; ++val) {
    path.push_back({v, val});
    grow(st, parts[val], path, used);
    path.pop_back();
  }
  used[v] = false;
}

}  // namespace

Structure learn_structure_dtsl(const Dataset& data, const DtslParams& params) {
  const Compressed comp = compress(data);
  Structure structure;
  std::set<std::vector<Literal>> seen;
  std::vector<std::size_t> all(comp.configs.size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  for (std::uint32_t target = 0; target < data.schema.size(); ++target) {
    DtslState st{comp,
                 data.schema,
                 target,
                 static_cast<std::uint32_t>(data.schema.var(target).domain.size()),
                 params,
                 &structure.features,
                 &seen};
    std::vector<Literal> path;
    std::vector<bool> used(data.schema.size(), false);
    grow(st, all, path, used);
  }
  return structure;
}

Structure empty_structure(const Schema& schema) {
  Structure structure;
  for (std::uint32_t v = 0; v < schema.size(); ++v)
    for (std::uint32_t val = 1; val < schema.var(v).domain.size(); ++val)
      structure.features.push_back(Feature({{v, val}}, 0.0));
  return structure;
}

}  // namespace kt
