#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace kt {

/// A named finite-domain discrete variable. Domain values are ordered and
/// the order is significant (value indices refer into it).
struct Variable {
  std::string name;
  std::vector<std::string> domain;

  bool operator==(const Variable&) const = default;
};

/// An ordered set of variables with unique names. Immutable after
/// construction; safe to share across threads.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Variable> variables);

  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const Variable& var(std::size_t i) const { return vars_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }

  std::optional<std::uint32_t> index_of(std::string_view name) const;
  /// Like index_of but throws ContractError when the name is unknown.
  std::uint32_t require(std::string_view name) const;
  /// Index of `value` within variable i's domain; throws when absent.
  std::uint32_t value_index(std::uint32_t var, std::string_view value) const;

  bool operator==(const Schema& other) const { return vars_ == other.vars_; }

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, std::uint32_t> by_name_;
};

/// variable = value, by index into a schema.
struct Literal {
  std::uint32_t var = 0;
  std::uint32_t value = 0;

  auto operator<=>(const Literal&) const = default;
};

/// One complete value index per schema variable.
using Assignment = std::vector<std::int32_t>;

/// A conjunction of literals with a real weight; at most one literal per
/// variable. Literals are kept sorted by variable index, so equality of
/// literal vectors is equality of the conjunctions.
class Feature {
 public:
  Feature(std::vector<Literal> literals, double weight);

  const std::vector<Literal>& literals() const { return literals_; }
  double weight() const { return weight_; }
  Feature with_weight(double w) const { return Feature(literals_, w); }

  bool satisfied_by(const Assignment& a) const;

  bool operator==(const Feature& other) const = default;

 private:
  std::vector<Literal> literals_;
  double weight_;
};

/// p(x) proportional to exp(sum_i w_i f_i(x)) over a schema. Strictly
/// positive for finite weights. Immutable after construction.
class LogLinearModel {
 public:
  /// Empty model over the empty schema (Z = 1).
  LogLinearModel() = default;
  LogLinearModel(Schema schema, std::vector<Feature> features);

  const Schema& schema() const { return schema_; }
  const std::vector<Feature>& features() const { return features_; }

 private:
  Schema schema_;
  std::vector<Feature> features_;
};

/// Sum of weights of satisfied features. Throws ContractError when the
/// assignment is not complete over the model's schema.
double energy(const LogLinearModel& model, const Assignment& a);

/// Model with every variable renamed per `names` (domains must be unchanged
/// in size). Used to compare a source model against its target-schema twin.
LogLinearModel rename_variables(const LogLinearModel& model,
                                const std::vector<std::string>& names);

/// A list of complete assignments over one schema, with free-form
/// provenance (seed, generator id, ...).
struct Dataset {
  Schema schema;
  std::vector<Assignment> instances;
  nlohmann::json provenance = nlohmann::json::object();
};

/// Throws ContractError unless every instance is complete and in-range.
void validate_dataset(const Dataset& data);

}  // namespace kt
