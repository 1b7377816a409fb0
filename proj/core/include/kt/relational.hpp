#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kt/enumerate.hpp"
#include "kt/fo.hpp"
#include "kt/mapping.hpp"
#include "kt/model.hpp"

namespace kt {

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_types;
};

/// Typed predicate vocabulary. Grounding instantiates it at a constant set.
class RelationalSchema {
 public:
  RelationalSchema() = default;
  RelationalSchema(std::vector<std::string> types,
                   std::vector<PredicateDecl> predicates);

  const std::vector<std::string>& types() const { return types_; }
  const std::vector<PredicateDecl>& predicates() const { return preds_; }
  const PredicateDecl& predicate(std::string_view name) const;
  bool has_type(std::string_view name) const;

  /// Atom over fresh logical variables named by position: P(x0, x1, ...).
  fo::Atom atom(std::string_view pred) const;

 private:
  std::vector<std::string> types_;
  std::vector<PredicateDecl> preds_;
};

/// Possibly negated atom inside a clause.
struct FoLiteral {
  fo::Atom atom;
  bool negated = false;

  auto operator<=>(const FoLiteral&) const = default;
};

/// Weighted conjunction of (possibly negated) atoms; free variables are
/// implicitly universally quantified.
struct FirstOrderFeature {
  std::vector<FoLiteral> literals;
  double weight = 0.0;
};

/// Number of constants per type. Constants are named <type><index>.
using DomainSizes = std::map<std::string, std::uint32_t>;

/// Ground log-linear model plus the bookkeeping WPLL needs.
struct Grounding {
  LogLinearModel model;
  std::vector<std::uint32_t> atom_pred;      // ground var -> predicate index
  std::vector<std::uint64_t> pred_groundings;  // g_r per predicate
};

/// Propositional schema with one binary variable per ground atom, named
/// "Pred(c,...)"; domain {"false","true"}. Atom order: predicates in
/// declaration order, argument tuples in mixed-radix order.
Schema ground_schema(const RelationalSchema& schema, const DomainSizes& sizes);

/// Instantiates every clause at every type-consistent constant tuple.
/// Groundings where one atom appears with conflicting signs are dropped
/// (the conjunction is unsatisfiable); repeated same-sign atoms collapse.
/// Throws ContractError when a clause exceeds max_groundings.
Grounding ground(const RelationalSchema& schema,
                 const std::vector<FirstOrderFeature>& clauses,
                 const DomainSizes& sizes,
                 std::uint64_t max_groundings = kDefaultEnumerationCap);

/// Closed-world database: atoms listed are true, all others false.
struct RelationalDatabase {
  std::vector<std::string> true_atoms;
};

Assignment db_to_assignment(const RelationalDatabase& db, const Schema& ground);
RelationalDatabase assignment_to_db(const Assignment& a, const Schema& ground);

struct WpllReport {
  double total = 0.0;
  std::vector<double> per_predicate;  // terms summing to total
};

/// Sum over predicates r of (1/g_r) * sum over r's ground atoms of
/// log p(atom | rest) under the ground model.
WpllReport wpll(const Grounding& grounding, const Assignment& instance);
double wpll(const Grounding& grounding, const RelationalDatabase& db);
/// Mean instance WPLL over a dataset of ground assignments.
double wpll_mean(const Grounding& grounding, const Dataset& data);

/// Per-type mean of the training sizes, scaled and rounded half-up, min 1.
DomainSizes constants_heuristic(const std::vector<DomainSizes>& training_sizes,
                                double scalar);

/// First-order correspondence p(target atoms | source atoms). Logical
/// variables are shared across both sides; the table is over packed binary
/// truth configurations (rows: source atoms, first most significant; cols:
/// target atoms).
struct FoCorrespondence {
  std::vector<fo::Atom> source_atoms;
  std::vector<fo::Atom> target_atoms;
  std::vector<double> table;
};

struct RelationalMapping {
  RelationalSchema source;
  RelationalSchema target;
  std::vector<FoCorrespondence> correspondences;

  bool source_pred_mapped(std::string_view pred) const;
};

/// Instantiates each first-order correspondence at every constant tuple,
/// yielding a propositional Mapping between the two ground schemas.
Mapping expand_mapping(const RelationalMapping& m, const DomainSizes& sizes);

}  // namespace kt
