#include "kt/conditionals.hpp"

#include <cmath>

#include "kt/enumerate.hpp"
#include "kt/error.hpp"

namespace kt {

LocalConditionals::LocalConditionals(const Schema& schema,
                                     const std::vector<Feature>& features)
    : features_(&features), by_var_(schema.size()) {
  radix_.reserve(schema.size());
  for (const Variable& v : schema.variables()) {
    radix_.push_back(static_cast<std::uint32_t>(v.domain.size()));
    max_radix_ = std::max(max_radix_, radix_.back());
  }
  for (std::uint32_t fi = 0; fi < features.size(); ++fi)
    for (const Literal& lit : features[fi].literals()) {
      if (lit.var >= schema.size() || lit.value >= radix_[lit.var])
        throw ContractError("LocalConditionals: feature literal outside schema");
      by_var_[lit.var].push_back({fi, lit.value});
    }
}

bool LocalConditionals::rest_satisfied(const Feature& f, const Assignment& a,
                                       std::uint32_t var) const {
  for (const Literal& lit : f.literals()) {
    if (lit.var == var) continue;
    if (a[lit.var] != static_cast<std::int32_t>(lit.value)) return false;
  }
  return true;
}

void LocalConditionals::local_logits(const Assignment& a, std::uint32_t var,
                                     std::span<double> logits) const {
  for (double& l : logits) l = 0.0;
  for (const Entry& e : by_var_[var]) {
    const Feature& f = (*features_)[e.feature];
    if (rest_satisfied(f, a, var)) logits[e.pinned] += f.weight();
  }
}

double LocalConditionals::log_conditional(const Assignment& a,
                                          std::uint32_t var) const {
  std::vector<double> logits(radix_[var]);
  local_logits(a, var, logits);
  return logits[a[var]] - log_sum_exp(logits);
}

double LocalConditionals::instance_pll(const Assignment& a) const {
  double total = 0.0;
  std::vector<double> logits(max_radix_);
  for (std::uint32_t j = 0; j < by_var_.size(); ++j) {
    std::span<double> l(logits.data(), radix_[j]);
    local_logits(a, j, l);
    total += l[a[j]] - log_sum_exp(l);
  }
  return total;
}

double LocalConditionals::instance_pll_grad(const Assignment& a,
                                            std::span<double> grad) const {
  double total = 0.0;
  std::vector<double> logits(max_radix_);
  std::vector<double> probs(max_radix_);
  for (std::uint32_t j = 0; j < by_var_.size(); ++j) {
    const std::uint32_t d = radix_[j];
    std::span<double> l(logits.data(), d);
    local_logits(a, j, l);
    const double lse = log_sum_exp(l);
    total += l[a[j]] - lse;
    for (std::uint32_t v = 0; v < d; ++v) probs[v] = std::exp(l[v] - lse);
    // d/dw_i log p(x_j | rest) = f_i(x) - E_{v ~ p(.|rest)} f_i(x with x_j=v),
    // nonzero only for features whose non-j literals already hold.
    for (const Entry& e : by_var_[j]) {
      const Feature& f = (*features_)[e.feature];
      if (!rest_satisfied(f, a, j)) continue;
      const double observed = (a[j] == static_cast<std::int32_t>(e.pinned)) ? 1.0 : 0.0;
      grad[e.feature] += observed - probs[e.pinned];
    }
  }
  return total;
}

double pll(const LogLinearModel& model, const Dataset& data) {
  if (!(model.schema() == data.schema))
    throw ContractError("pll: dataset schema does not match model schema");
  if (data.instances.empty()) throw ContractError("pll: empty dataset");
  LocalConditionals lc(model.schema(), model.features());
  double total = 0.0;
  for (const Assignment& a : data.instances) {
    if (a.size() != model.schema().size())
      throw ContractError("pll: incomplete instance");
    total += lc.instance_pll(a);
  }
  return total / static_cast<double>(data.instances.size());
}

}  // namespace kt
