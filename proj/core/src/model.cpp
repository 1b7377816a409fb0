#include "kt/model.hpp"

#include <algorithm>
#include <cmath>

#include "kt/error.hpp"

namespace kt {

Schema::Schema(std::vector<Variable> variables) : vars_(std::move(variables)) {
  for (std::uint32_t i = 0; i < vars_.size(); ++i) {
    const Variable& v = vars_[i];
    if (v.name.empty()) throw ContractError("Schema: empty variable name");
    if (v.domain.size() < 2)
      throw ContractError("Schema: variable '" + v.name +
                          "' needs a domain of at least 2 values");
    for (std::size_t a = 0; a < v.domain.size(); ++a)
      for (std::size_t b = a + 1; b < v.domain.size(); ++b)
        if (v.domain[a] == v.domain[b])
          throw ContractError("Schema: duplicate domain value '" + v.domain[a] +
                              "' in variable '" + v.name + "'");
    if (!by_name_.emplace(v.name, i).second)
      throw ContractError("Schema: duplicate variable name '" + v.name + "'");
  }
}

std::optional<std::uint32_t> Schema::index_of(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Schema::require(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw ContractError("Schema: unknown variable '" + std::string(name) + "'");
  return *idx;
}

std::uint32_t Schema::value_index(std::uint32_t var, std::string_view value) const {
  const Variable& v = vars_.at(var);
  for (std::uint32_t i = 0; i < v.domain.size(); ++i)
    if (v.domain[i] == value) return i;
  throw ContractError("Schema: value '" + std::string(value) +
                      "' not in domain of variable '" + v.name + "'");
}

Feature::Feature(std::vector<Literal> literals, double weight)
    : literals_(std::move(literals)), weight_(weight) {
  if (literals_.empty()) throw ContractError("Feature: empty literal set");
  if (!std::isfinite(weight_)) throw ContractError("Feature: non-finite weight");
  std::sort(literals_.begin(), literals_.end());
  for (std::size_t i = 1; i < literals_.size(); ++i)
    if (literals_[i].var == literals_[i - 1].var)
      throw ContractError("Feature: more than one literal on the same variable");
}

bool Feature::satisfied_by(const Assignment& a) const {
  for (const Literal& lit : literals_)
    if (a[lit.var] != static_cast<std::int32_t>(lit.value)) return false;
  return true;
}

LogLinearModel::LogLinearModel(Schema schema, std::vector<Feature> features)
    : schema_(std::move(schema)), features_(std::move(features)) {
  for (const Feature& f : features_)
    for (const Literal& lit : f.literals()) {
      if (lit.var >= schema_.size())
        throw ContractError("LogLinearModel: literal references unknown variable");
      if (lit.value >= schema_.var(lit.var).domain.size())
        throw ContractError("LogLinearModel: literal value out of domain range");
    }
}

double energy(const LogLinearModel& model, const Assignment& a) {
  if (a.size() != model.schema().size())
    throw ContractError("energy: assignment incomplete over schema");
  for (std::size_t v = 0; v < a.size(); ++v)
    if (a[v] < 0 || static_cast<std::size_t>(a[v]) >=
                        model.schema().var(v).domain.size())
      throw ContractError("energy: value out of range for variable " +
                          model.schema().var(v).name);
  double e = 0.0;
  for (const Feature& f : model.features())
    if (f.satisfied_by(a)) e += f.weight();
  return e;
}

LogLinearModel rename_variables(const LogLinearModel& model,
                                const std::vector<std::string>& names) {
  if (names.size() != model.schema().size())
    throw ContractError("rename_variables: name count does not match schema");
  std::vector<Variable> vars;
  vars.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    vars.push_back({names[i], model.schema().var(i).domain});
  return LogLinearModel(Schema(std::move(vars)), model.features());
}

void validate_dataset(const Dataset& data) {
  for (const Assignment& a : data.instances) {
    if (a.size() != data.schema.size())
      throw ContractError("Dataset: instance incomplete over schema");
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j] < 0 ||
          a[j] >= static_cast<std::int32_t>(data.schema.var(j).domain.size()))
        throw ContractError("Dataset: value index out of range");
  }
}

}  // namespace kt
