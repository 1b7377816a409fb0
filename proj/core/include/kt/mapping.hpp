#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kt/enumerate.hpp"
#include "kt/model.hpp"

namespace kt {

/// Local conditional table p(C'_i = c' | C_i = c) between a small set of
/// source variables and a small set of target variables. Rows are indexed by
/// the packed source configuration (first variable most significant), columns
/// by the packed target configuration; `table` is row-major.
struct Correspondence {
  std::vector<std::uint32_t> source_vars;
  std::vector<std::uint32_t> target_vars;
  std::vector<double> table;

  std::uint64_t row_count(const Schema& source) const;
  std::uint64_t col_count(const Schema& target) const;
  std::uint64_t row_of(const Assignment& source_instance, const Schema& source) const;
  double prob(std::uint64_t row, std::uint64_t col, const Schema& target) const;
};

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity;
  int correspondence;  // -1 when not tied to one correspondence
  std::int64_t row;    // -1 when not tied to one row
  std::string message;
};

/// A probabilistic schema mapping: a set of correspondences between a source
/// and a target schema. Structural sanity (indices and table dimensions) is
/// enforced at construction; probabilistic invariants are reported by
/// validate_mapping.
class Mapping {
 public:
  /// Empty mapping between empty schemas.
  Mapping() = default;
  Mapping(Schema source, Schema target, std::vector<Correspondence> correspondences);

  const Schema& source_schema() const { return source_; }
  const Schema& target_schema() const { return target_; }
  const std::vector<Correspondence>& correspondences() const { return corrs_; }

  /// Target variables covered by no correspondence (implicitly uniform).
  std::vector<std::uint32_t> unmapped_target_vars() const;
  /// Source variables covered by no correspondence (marginalized out).
  std::vector<std::uint32_t> unmapped_source_vars() const;
  bool source_var_mapped(std::uint32_t v) const;

 private:
  Schema source_;
  Schema target_;
  std::vector<Correspondence> corrs_;
};

/// Probabilistic invariants: rows normalized to 1 +- 1e-9, entries >= 0,
/// target variable sets pairwise disjoint. Violations are errors; target
/// variables missing from every correspondence produce a warning.
std::vector<Diagnostic> validate_mapping(const Mapping& m);

/// True when no error-severity diagnostic is present.
bool mapping_ok(const std::vector<Diagnostic>& diagnostics);

enum class ZeroPolicy {
  kReject,            // zero table entry is an error
  kClampRenormalize,  // clamp entries to 1e-6, renormalize each row
};

/// The log-weight features of one correspondence: one feature per joint
/// configuration of C_i and C'_i with weight log p(c'|c). Target variable
/// indices are shifted by target_offset so the features can live in a joint
/// source+target schema (pass 0 to keep raw target indices).
std::vector<Feature> correspondence_log_weights(
    const Correspondence& c, const Schema& source, const Schema& target,
    ZeroPolicy policy = ZeroPolicy::kReject, std::uint32_t target_offset = 0);

/// Joint model over source variables followed by target variables. Target
/// variable i of the mapping's target schema is joint variable
/// n_source_vars + i; target names carry a prime suffix.
struct JointModel {
  LogLinearModel model;
  std::uint32_t n_source_vars;

  std::uint32_t joint_index_of_target(std::uint32_t target_var) const {
    return n_source_vars + target_var;
  }
};

/// Combined schema of a joint model; target variable names get "'" appended.
Schema build_joint_schema(const Schema& source, const Schema& target);

/// p(X, X') = p(X) * prod_i p(C'_i | C_i) as one log-linear model: the source
/// features plus every correspondence's log-weight features. The mapping must
/// validate cleanly and its source schema must equal the model's schema.
JointModel build_joint_model(const LogLinearModel& source, const Mapping& m,
                             ZeroPolicy policy = ZeroPolicy::kReject);

/// Exact marginal table over the target variables of the joint, indexed in
/// AssignmentSpace order of the target schema.
std::vector<double> implied_target_distribution(
    const JointModel& joint, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace kt
