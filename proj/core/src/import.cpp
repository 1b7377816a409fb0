#include "kt/import.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kt/error.hpp"

namespace kt {

namespace {

constexpr double kClampEps = 1e-6;

void check_rule(const Rule& rule, const Schema& schema) {
  if (rule.consequent.empty())
    throw ContractError("Rule: empty consequent");
  std::set<std::uint32_t> ante_vars;
  for (const Literal& lit : rule.antecedent) {
    if (lit.var >= schema.size() ||
        lit.value >= schema.var(lit.var).domain.size())
      throw ContractError("Rule: literal references unknown variable or value");
    if (!ante_vars.insert(lit.var).second)
      throw ContractError("Rule: duplicate antecedent variable");
  }
  std::set<std::uint32_t> cons_vars;
  for (const Literal& lit : rule.consequent) {
    if (lit.var >= schema.size() ||
        lit.value >= schema.var(lit.var).domain.size())
      throw ContractError("Rule: literal references unknown variable or value");
    if (!cons_vars.insert(lit.var).second)
      throw ContractError("Rule: duplicate consequent variable");
    if (ante_vars.count(lit.var))
      throw ContractError("Rule: antecedent and consequent share a variable");
  }
}

}  // namespace

double log_odds_weight(double p_rule, double u_rule) {
  if (!(p_rule > 0.0 && p_rule < 1.0))
    throw DegenerateProbabilityError("log_odds_weight: p must be strictly inside (0,1)");
  if (!(u_rule > 0.0 && u_rule < 1.0))
    throw DegenerateProbabilityError("log_odds_weight: u must be strictly inside (0,1)");
  return std::log(p_rule / (1.0 - p_rule)) - std::log(u_rule / (1.0 - u_rule));
}

double uniform_satisfaction(const Rule& rule, const Schema& schema) {
  check_rule(rule, schema);
  std::vector<std::uint32_t> vars;
  for (const Literal& lit : rule.antecedent) vars.push_back(lit.var);
  for (const Literal& lit : rule.consequent) vars.push_back(lit.var);
  std::sort(vars.begin(), vars.end());

  std::uint64_t total = 1;
  for (std::uint32_t v : vars) {
    std::uint64_t d = schema.var(v).domain.size();
    if (total > kDefaultEnumerationCap / d)
      throw OracleTooLargeError("uniform_satisfaction: rule mentions too many variables");
    total *= d;
  }
  std::uint64_t cons_cells = 1;
  for (const Literal& lit : rule.consequent)
    cons_cells *= schema.var(lit.var).domain.size();
  // The implication fails only in cells where the antecedent holds (exactly
  // one combination of the antecedent variables) and the consequent does not
  // (cons_cells - 1 combinations of the consequent variables).
  const std::uint64_t violating = cons_cells - 1;
  const std::uint64_t satisfied = total - violating;
  return static_cast<double>(satisfied) / static_cast<double>(total);
}

std::vector<Feature> rule_to_features(const Rule& rule, const Schema& schema,
                                      UniformMode mode, bool clamp_confidence) {
  check_rule(rule, schema);
  double conf = rule.confidence;
  if (clamp_confidence)
    conf = std::clamp(conf, kClampEps, 1.0 - kClampEps);
  const double u =
      mode == UniformMode::kHalf ? 0.5 : uniform_satisfaction(rule, schema);
  const double w = log_odds_weight(conf, u);

  std::vector<Literal> both = rule.antecedent;
  both.insert(both.end(), rule.consequent.begin(), rule.consequent.end());
  std::vector<Feature> features;
  features.emplace_back(std::move(both), w);
  if (!rule.antecedent.empty()) features.emplace_back(rule.antecedent, -w);
  return features;
}

LogLinearModel rules_to_model(const std::vector<Rule>& rules, const Schema& schema,
                              UniformMode mode, bool clamp_confidence) {
  std::vector<Feature> features;
  for (const Rule& rule : rules) {
    auto fs = rule_to_features(rule, schema, mode, clamp_confidence);
    features.insert(features.end(), fs.begin(), fs.end());
  }
  return LogLinearModel(schema, std::move(features));
}

LogLinearModel conditional_to_joint(const ConditionalModel& cm, std::uint64_t cap) {
  std::vector<bool> is_evidence(cm.schema.size(), false);
  for (std::uint32_t v : cm.evidence_vars) {
    if (v >= cm.schema.size())
      throw ContractError("conditional_to_joint: evidence variable out of range");
    if (is_evidence[v])
      throw ContractError("conditional_to_joint: duplicate evidence variable");
    is_evidence[v] = true;
  }
  std::vector<std::uint32_t> evidence;
  for (std::uint32_t v = 0; v < cm.schema.size(); ++v)
    if (is_evidence[v]) evidence.push_back(v);
  if (evidence.empty()) return LogLinearModel(cm.schema, cm.features);

  // Pack evidence values; variable order within the pack follows the schema.
  std::uint64_t n_evidence_configs = 1;
  for (std::uint32_t v : evidence)
    n_evidence_configs *= cm.schema.var(v).domain.size();

  AssignmentSpace space(cm.schema, cap);
  const LogLinearModel conditional(cm.schema, cm.features);

  std::vector<double> max_e(n_evidence_configs, -INFINITY);
  std::vector<double> sum_e(n_evidence_configs, 0.0);
  Assignment a = space.first();
  do {
    std::uint64_t idx = 0;
    for (std::uint32_t v : evidence)
      idx = idx * cm.schema.var(v).domain.size() + static_cast<std::uint64_t>(a[v]);
    const double e = energy(conditional, a);
    if (e <= max_e[idx]) {
      sum_e[idx] += std::exp(e - max_e[idx]);
    } else {
      sum_e[idx] = sum_e[idx] * std::exp(max_e[idx] - e) + 1.0;
      max_e[idx] = e;
    }
  } while (space.next(a));

  std::vector<double> log_z(n_evidence_configs);
  double mean_log_z = 0.0;
  for (std::uint64_t i = 0; i < n_evidence_configs; ++i) {
    log_z[i] = max_e[i] + std::log(sum_e[i]);
    mean_log_z += log_z[i];
  }
  mean_log_z /= static_cast<double>(n_evidence_configs);

  std::vector<Feature> features = cm.features;
  for (std::uint64_t i = 0; i < n_evidence_configs; ++i) {
    std::vector<Literal> lits;
    std::uint64_t rem = i;
    for (std::size_t k = evidence.size(); k-- > 0;) {
      const std::uint32_t v = evidence[k];
      const std::uint64_t d = cm.schema.var(v).domain.size();
      lits.push_back({v, static_cast<std::uint32_t>(rem % d)});
      rem /= d;
    }
    features.emplace_back(std::move(lits), mean_log_z - log_z[i]);
  }
  return LogLinearModel(cm.schema, std::move(features));
}

}  // namespace kt
