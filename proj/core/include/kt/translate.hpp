#pragma once

#include <cstdint>
#include <vector>

#include "kt/learning.hpp"
#include "kt/mapping.hpp"
#include "kt/model.hpp"
#include "kt/relational.hpp"

namespace kt {

/// Variable set of one potential/feature; sorted, distinct, non-empty.
using Clique = std::vector<std::uint32_t>;

/// Variable sets of the features with |weight| > threshold, deduplicated
/// and canonically sorted.
std::vector<Clique> structure_to_cliques(const LogLinearModel& model,
                                         double threshold);

/// Removes every variable the mapping does not cover: repeatedly pick the
/// unmapped variable in the fewest cliques (ties by name), merge each pair
/// of cliques containing it (union minus the variable; a lone clique is
/// reinserted minus the variable), drop empty results, deduplicate.
std::vector<Clique> eliminate_unmapped(std::vector<Clique> cliques,
                                       const Mapping& m);

/// Rewrites cliques into the target schema: each variable is replaced by the
/// target variable set of each correspondence covering it, one output clique
/// per element of the Cartesian product of choices. Throws ContractError on
/// a variable no correspondence covers.
std::vector<Clique> translate_cliques(const std::vector<Clique>& cliques,
                                      const Mapping& m);

/// All conjunctive features over each clique's domain product, weights zero.
/// Throws ContractError when one clique would expand past max_per_clique.
Structure expand_cliques(const std::vector<Clique>& cliques,
                         const Schema& schema,
                         std::uint64_t max_per_clique = 4096);

/// Algorithm 1 end to end: threshold, eliminate, translate, expand.
Structure translate_structure(const LogLinearModel& model, const Mapping& m,
                              double threshold);

/// First-order clique: a set of atoms in canonical variable naming (atoms
/// sorted, variables renamed v0, v1, ... by first occurrence).
struct FoClique {
  std::vector<fo::Atom> atoms;

  auto operator<=>(const FoClique&) const = default;
};

FoClique canonical_fo_clique(std::vector<fo::Atom> atoms);

std::vector<FoClique> fo_structure_to_cliques(
    const std::vector<FirstOrderFeature>& clauses, double threshold);

/// Predicate-level elimination mirroring eliminate_unmapped: merging two
/// cliques unifies one atom of the eliminated predicate from each side
/// (every atom pairing and unifier is kept) and removes that predicate's
/// atoms from the union.
std::vector<FoClique> fo_eliminate_unmapped(std::vector<FoClique> cliques,
                                            const RelationalMapping& m);

/// Atom-level Cartesian-product rewriting through the first-order
/// correspondences; each covering correspondence whose source atom unifies
/// contributes its (substituted) target atoms.
std::vector<FoClique> fo_translate_cliques(const std::vector<FoClique>& cliques,
                                           const RelationalMapping& m);

/// All sign patterns over each clique's atoms as zero-weight clauses.
std::vector<FirstOrderFeature> fo_expand_cliques(
    const std::vector<FoClique>& cliques, std::uint64_t max_per_clique = 4096);

std::vector<FirstOrderFeature> translate_structure_fo(
    const std::vector<FirstOrderFeature>& clauses, const RelationalMapping& m,
    double threshold);

}  // namespace kt
