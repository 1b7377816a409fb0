#include "kt/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kt/error.hpp"

namespace kt {

namespace {

constexpr double kRowTolerance = 1e-9;
constexpr double kClampEps = 1e-6;

std::uint64_t config_count(const std::vector<std::uint32_t>& vars,
                           const Schema& schema) {
  std::uint64_t n = 1;
  for (std::uint32_t v : vars) n *= schema.var(v).domain.size();
  return n;
}

}  // namespace

std::uint64_t Correspondence::row_count(const Schema& source) const {
  return config_count(source_vars, source);
}

std::uint64_t Correspondence::col_count(const Schema& target) const {
  return config_count(target_vars, target);
}

std::uint64_t Correspondence::row_of(const Assignment& source_instance,
                                     const Schema& source) const {
  std::uint64_t row = 0;
  for (std::uint32_t v : source_vars)
    row = row * source.var(v).domain.size() +
          static_cast<std::uint64_t>(source_instance[v]);
  return row;
}

double Correspondence::prob(std::uint64_t row, std::uint64_t col,
                            const Schema& target) const {
  return table[row * col_count(target) + col];
}

Mapping::Mapping(Schema source, Schema target,
                 std::vector<Correspondence> correspondences)
    : source_(std::move(source)),
      target_(std::move(target)),
      corrs_(std::move(correspondences)) {
  for (const Correspondence& c : corrs_) {
    if (c.source_vars.empty() || c.target_vars.empty())
      throw ContractError("Correspondence: variable sets must be non-empty");
    std::set<std::uint32_t> seen_src(c.source_vars.begin(), c.source_vars.end());
    std::set<std::uint32_t> seen_tgt(c.target_vars.begin(), c.target_vars.end());
    if (seen_src.size() != c.source_vars.size() ||
        seen_tgt.size() != c.target_vars.size())
      throw ContractError("Correspondence: duplicate variable within one side");
    for (std::uint32_t v : c.source_vars)
      if (v >= source_.size())
        throw ContractError("Correspondence: source variable out of range");
    for (std::uint32_t v : c.target_vars)
      if (v >= target_.size())
        throw ContractError("Correspondence: target variable out of range");
    if (c.table.size() != c.row_count(source_) * c.col_count(target_))
      throw ContractError("Correspondence: table size does not match domains");
  }
}

bool Mapping::source_var_mapped(std::uint32_t v) const {
  for (const Correspondence& c : corrs_)
    if (std::find(c.source_vars.begin(), c.source_vars.end(), v) !=
        c.source_vars.end())
      return true;
  return false;
}

std::vector<std::uint32_t> Mapping::unmapped_target_vars() const {
  std::vector<bool> covered(target_.size(), false);
  for (const Correspondence& c : corrs_)
    for (std::uint32_t v : c.target_vars) covered[v] = true;
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < target_.size(); ++v)
    if (!covered[v]) out.push_back(v);
  return out;
}

std::vector<std::uint32_t> Mapping::unmapped_source_vars() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < source_.size(); ++v)
    if (!source_var_mapped(v)) out.push_back(v);
  return out;
}

std::vector<Diagnostic> validate_mapping(const Mapping& m) {
  std::vector<Diagnostic> out;
  const Schema& tgt = m.target_schema();

  for (int ci = 0; ci < static_cast<int>(m.correspondences().size()); ++ci) {
    const Correspondence& c = m.correspondences()[ci];
    const std::uint64_t rows = c.row_count(m.source_schema());
    const std::uint64_t cols = c.col_count(tgt);
    for (std::uint64_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      bool negative = false;
      for (std::uint64_t k = 0; k < cols; ++k) {
        const double p = c.table[r * cols + k];
        if (p < 0.0) negative = true;
        sum += p;
      }
      if (negative)
        out.push_back({Diagnostic::Severity::kError, ci,
                       static_cast<std::int64_t>(r), "negative table entry"});
      if (std::abs(sum - 1.0) > kRowTolerance)
        out.push_back({Diagnostic::Severity::kError, ci,
                       static_cast<std::int64_t>(r),
                       "row not normalized (sums to " + std::to_string(sum) + ")"});
    }
  }

  // Assumption 1 is only well defined when target variable sets are disjoint.
  std::vector<int> owner(tgt.size(), -1);
  for (int ci = 0; ci < static_cast<int>(m.correspondences().size()); ++ci)
    for (std::uint32_t v : m.correspondences()[ci].target_vars) {
      if (owner[v] >= 0)
        out.push_back({Diagnostic::Severity::kError, ci, -1,
                       "overlapping targets: variable '" + tgt.var(v).name +
                           "' already in correspondence " +
                           std::to_string(owner[v])});
      else
        owner[v] = ci;
    }

  for (std::uint32_t v : m.unmapped_target_vars())
    out.push_back({Diagnostic::Severity::kWarning, -1, -1,
                   "target variable '" + tgt.var(v).name +
                       "' is in no correspondence; it will be uniform"});
  return out;
}

bool mapping_ok(const std::vector<Diagnostic>& diagnostics) {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) {
                        return d.severity == Diagnostic::Severity::kError;
                      });
}

std::vector<Feature> correspondence_log_weights(const Correspondence& c,
                                                const Schema& source,
                                                const Schema& target,
                                                ZeroPolicy policy,
                                                std::uint32_t target_offset) {
  const std::uint64_t rows = c.row_count(source);
  const std::uint64_t cols = c.col_count(target);

  std::vector<double> table = c.table;
  if (policy == ZeroPolicy::kClampRenormalize) {
    for (std::uint64_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::uint64_t k = 0; k < cols; ++k) {
        double& p = table[r * cols + k];
        p = std::max(p, kClampEps);
        sum += p;
      }
      for (std::uint64_t k = 0; k < cols; ++k) table[r * cols + k] /= sum;
    }
  }

  std::vector<Feature> out;
  out.reserve(rows * cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t k = 0; k < cols; ++k) {
      const double p = table[r * cols + k];
      if (!(p > 0.0))
        throw ContractError(
            "correspondence_log_weights: zero table entry (enable clamping "
            "or fix the mapping)");
      std::vector<Literal> lits;
      std::uint64_t rem = r;
      for (std::size_t i = c.source_vars.size(); i-- > 0;) {
        const std::uint32_t v = c.source_vars[i];
        const std::uint64_t d = source.var(v).domain.size();
        lits.push_back({v, static_cast<std::uint32_t>(rem % d)});
        rem /= d;
      }
      rem = k;
      for (std::size_t i = c.target_vars.size(); i-- > 0;) {
        const std::uint32_t v = c.target_vars[i];
        const std::uint64_t d = target.var(v).domain.size();
        lits.push_back({v + target_offset, static_cast<std::uint32_t>(rem % d)});
        rem /= d;
      }
      out.emplace_back(std::move(lits), std::log(p));
    }
  }
  return out;
}

Schema build_joint_schema(const Schema& source, const Schema& target) {
  std::vector<Variable> vars = source.variables();
  vars.reserve(source.size() + target.size());
  for (const Variable& v : target.variables())
    vars.push_back({v.name + "'", v.domain});
  return Schema(std::move(vars));
}

JointModel build_joint_model(const LogLinearModel& source, const Mapping& m,
                             ZeroPolicy policy) {
  if (!(source.schema() == m.source_schema()))
    throw ContractError("build_joint_model: mapping source schema mismatch");
  if (!mapping_ok(validate_mapping(m)))
    throw ContractError("build_joint_model: mapping has validation errors");

  const std::uint32_t n_src = static_cast<std::uint32_t>(source.schema().size());
  Schema joint_schema = build_joint_schema(m.source_schema(), m.target_schema());

  std::vector<Feature> features = source.features();
  for (const Correspondence& c : m.correspondences()) {
    auto fs = correspondence_log_weights(c, m.source_schema(), m.target_schema(),
                                         policy, n_src);
    features.insert(features.end(), fs.begin(), fs.end());
  }
  // Unmapped target variables take no features: with nothing touching them
  // they are uniform, which is exactly the implicit uniform correspondence.
  return JointModel{LogLinearModel(std::move(joint_schema), std::move(features)),
                    n_src};
}

std::vector<double> implied_target_distribution(const JointModel& joint,
                                                std::uint64_t cap) {
  const Schema& schema = joint.model.schema();
  const std::uint32_t n_src = joint.n_source_vars;
  const std::uint32_t n_tgt = static_cast<std::uint32_t>(schema.size()) - n_src;

  std::uint64_t n_target_configs = 1;
  for (std::uint32_t t = 0; t < n_tgt; ++t)
    n_target_configs *= schema.var(n_src + t).domain.size();

  AssignmentSpace space(schema, cap);
  std::vector<double> energies(space.size());
  std::vector<std::uint64_t> target_index(space.size());
  Assignment a = space.first();
  std::uint64_t i = 0;
  do {
    energies[i] = energy(joint.model, a);
    std::uint64_t t_idx = 0;
    for (std::uint32_t t = 0; t < n_tgt; ++t)
      t_idx = t_idx * schema.var(n_src + t).domain.size() +
              static_cast<std::uint64_t>(a[n_src + t]);
    target_index[i] = t_idx;
    ++i;
  } while (space.next(a));

  const double log_z = log_sum_exp(energies);
  std::vector<double> table(n_target_configs, 0.0);
  for (std::uint64_t k = 0; k < energies.size(); ++k)
    table[target_index[k]] += std::exp(energies[k] - log_z);
  return table;
}

}  // namespace kt
