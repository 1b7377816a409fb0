#pragma once

#include <cstdint>
#include <vector>

#include "kt/enumerate.hpp"
#include "kt/model.hpp"

namespace kt {

/// Mined implication "antecedent -> consequent" holding with the given
/// confidence. Antecedent may be empty (an unconditional rule).
struct Rule {
  std::vector<Literal> antecedent;
  std::vector<Literal> consequent;
  double confidence = 0.5;
};

/// Convention for the uniform-distribution probability u of a rule.
/// kHalf fixes u = 0.5; kUniformCells counts the satisfying fraction of the
/// implication over the uniform distribution of the mentioned variables.
enum class UniformMode { kHalf, kUniformCells };

/// log(p/(1-p)) - log(u/(1-u)). Throws DegenerateProbabilityError when
/// either argument sits at 0 or 1.
double log_odds_weight(double p_rule, double u_rule);

/// Fraction of value combinations of the rule's variables, under a uniform
/// distribution, in which the implication holds.
double uniform_satisfaction(const Rule& rule, const Schema& schema);

/// Compiles a rule into conjunctive features carrying the rule's log-odds
/// weight w = log_odds_weight(confidence, u). An implication A -> C is
/// distribution-equivalent to the feature pair {A and C, +w}, {A, -w}
/// (indicator identity 1[A -> C] = 1 - 1[A] + 1[A and C], constants drop
/// under normalization); an unconditional rule compiles to {C, +w} alone.
/// With clamp_confidence, confidences at 0/1 are pulled to [1e-6, 1-1e-6]
/// instead of rejected.
std::vector<Feature> rule_to_features(const Rule& rule, const Schema& schema,
                                      UniformMode mode = UniformMode::kHalf,
                                      bool clamp_confidence = false);

/// Rule-set import: all rules compiled against one schema.
LogLinearModel rules_to_model(const std::vector<Rule>& rules, const Schema& schema,
                              UniformMode mode = UniformMode::kHalf,
                              bool clamp_confidence = false);

/// p(Y | X) given by features over the full schema, with evidence_vars = X
/// and the remaining variables as targets Y.
struct ConditionalModel {
  Schema schema;
  std::vector<std::uint32_t> evidence_vars;
  std::vector<Feature> features;
};

/// Extends the conditional to a joint by assuming a uniform prior over the
/// evidence: the features are kept and one calibration feature per evidence
/// configuration cancels the conditional's per-configuration normalizer.
LogLinearModel conditional_to_joint(const ConditionalModel& cm,
                                    std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace kt
