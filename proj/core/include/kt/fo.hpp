#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kt::fo {

/// A typed logical variable or constant.
struct Term {
  enum class Kind { kVar, kConst };

  Kind kind = Kind::kVar;
  std::string name;
  std::string type;

  auto operator<=>(const Term&) const = default;
};

inline Term var(std::string name, std::string type) {
  return {Term::Kind::kVar, std::move(name), std::move(type)};
}
inline Term constant(std::string name, std::string type) {
  return {Term::Kind::kConst, std::move(name), std::move(type)};
}

/// predicate(arg, ...) over typed terms. Negation is not part of an atom;
/// it belongs to the clause literal.
struct Atom {
  std::string pred;
  std::vector<Term> args;

  auto operator<=>(const Atom&) const = default;
};

/// Variable name -> replacement term. Fully resolved: no binding's
/// right-hand side is itself a bound variable.
using Substitution = std::map<std::string, Term>;

Term apply(const Term& t, const Substitution& s);
Atom apply(const Atom& a, const Substitution& s);

/// Most general unifier of two atoms, or nullopt when none exists.
/// Variables bind only to terms of the same type. Without function symbols
/// the MGU is unique up to renaming.
std::optional<Substitution> unify_atoms(const Atom& a, const Atom& b);

/// Unifies a with b under the constraints already in s, extending s.
/// Returns false (s in unspecified state) when no unifier exists; bindings
/// may be chained, which apply() resolves.
bool unify_into(const Atom& a, const Atom& b, Substitution& s);

/// Atoms with every variable renamed to "<prefix><k>" (k by first
/// occurrence), making the set variable-disjoint from any other set that
/// used a different prefix.
std::vector<Atom> standardize_apart(const std::vector<Atom>& atoms,
                                    const std::string& prefix);

}  // namespace kt::fo
