#include "kt/fo.hpp"

namespace kt::fo {
namespace {

// Follows variable bindings to a fixed point. Chains are short (no function
// symbols), so no path compression is needed.
Term resolve(Term t, const Substitution& s) {
  while (t.kind == Term::Kind::kVar) {
    auto it = s.find(t.name);
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

bool unify_terms(const Term& lhs, const Term& rhs, Substitution& s) {
  const Term a = resolve(lhs, s);
  const Term b = resolve(rhs, s);
  if (a.type != b.type) return false;
  if (a.kind == Term::Kind::kConst && b.kind == Term::Kind::kConst)
    return a.name == b.name;
  if (a.kind == Term::Kind::kVar) {
    if (b.kind == Term::Kind::kVar && a.name == b.name) return true;
    s.emplace(a.name, b);
    return true;
  }
  s.emplace(b.name, a);
  return true;
}

}  // namespace

Term apply(const Term& t, const Substitution& s) { return resolve(t, s); }

Atom apply(const Atom& a, const Substitution& s) {
  Atom out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(resolve(t, s));
  return out;
}

std::optional<Substitution> unify_atoms(const Atom& a, const Atom& b) {
  Substitution s;
  if (!unify_into(a, b, s)) return std::nullopt;
  // Resolve right-hand sides so a single application suffices downstream.
  for (auto& [name, term] : s) term = resolve(term, s);
  return s;
}

bool unify_into(const Atom& a, const Atom& b, Substitution& s) {
  if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_terms(a.args[i], b.args[i], s)) return false;
  return true;
}

std::vector<Atom> standardize_apart(const std::vector<Atom>& atoms,
                                    const std::string& prefix) {
  Substitution rename;
  std::size_t next = 0;
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) {
    Atom r{a.pred, {}};
    r.args.reserve(a.args.size());
    for (const Term& t : a.args) {
      if (t.kind == Term::Kind::kConst) {
        r.args.push_back(t);
        continue;
      }
      auto [it, inserted] =
          rename.emplace(t.name, var(prefix + std::to_string(next), t.type));
      if (inserted) ++next;
      r.args.push_back(it->second);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace kt::fo
