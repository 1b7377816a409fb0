#include "kt/translate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "kt/error.hpp"

namespace kt {
namespace {

Clique canonical(Clique c, std::size_t n_vars, const char* who) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  if (c.empty()) throw ContractError(std::string(who) + ": empty clique");
  if (c.back() >= n_vars)
    throw ContractError(std::string(who) + ": variable index out of range");
  return c;
}

// Mixed-radix odometer over choice indices.
template <typename Fn>
void product(const std::vector<std::size_t>& radices, Fn&& fn) {
  std::vector<std::size_t> choice(radices.size(), 0);
  while (true) {
    fn(choice);
    std::size_t i = choice.size();
    while (i > 0) {
      --i;
      if (++choice[i] < radices[i]) break;
      choice[i] = 0;
      if (i == 0) return;
    }
    if (choice.empty()) return;
  }
}

}  // namespace

std::vector<Clique> structure_to_cliques(const LogLinearModel& model,
                                         double threshold) {
  if (threshold < 0.0 || std::isnan(threshold))
    throw ContractError("structure_to_cliques: threshold must be >= 0");
  std::set<Clique> out;
  for (const Feature& f : model.features()) {
    if (!(std::abs(f.weight()) > threshold)) continue;
    Clique c;
    for (const Literal& lit : f.literals()) c.push_back(lit.var);
    out.insert(std::move(c));  // literals are sorted and per-var unique
  }
  return {out.begin(), out.end()};
}

std::vector<Clique> eliminate_unmapped(std::vector<Clique> cliques,
                                       const Mapping& m) {
  const Schema& schema = m.source_schema();
  std::set<Clique> pool;
  for (Clique& c : cliques)
    pool.insert(canonical(std::move(c), schema.size(), "eliminate_unmapped"));

  while (true) {
    // Unmapped variable present in the fewest cliques; ties by name.
    std::vector<std::size_t> count(schema.size(), 0);
    for (const Clique& c : pool)
      for (std::uint32_t v : c)
        if (!m.source_var_mapped(v)) ++count[v];
    std::int64_t victim = -1;
    for (std::uint32_t v = 0; v < schema.size(); ++v) {
      if (count[v] == 0) continue;
      if (victim < 0 || count[v] < count[victim] ||
          (count[v] == count[victim] &&
           schema.var(v).name < schema.var(victim).name))
        victim = v;
    }
    if (victim < 0) return {pool.begin(), pool.end()};
    const auto p = static_cast<std::uint32_t>(victim);

    std::vector<Clique> phi;
    for (auto it = pool.begin(); it != pool.end();) {
      if (std::binary_search(it->begin(), it->end(), p)) {
        phi.push_back(*it);
        it = pool.erase(it);
      } else {
        ++it;
      }
    }
    auto without_p = [&](const Clique& a, const Clique& b) {
      Clique u;
      std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                     std::back_inserter(u));
      u.erase(std::remove(u.begin(), u.end(), p), u.end());
      return u;
    };
    if (phi.size() == 1) {
      Clique r = without_p(phi[0], phi[0]);
      if (!r.empty()) pool.insert(std::move(r));
    } else {
      for (std::size_t i = 0; i < phi.size(); ++i)
        for (std::size_t j = i + 1; j < phi.size(); ++j) {
          Clique r = without_p(phi[i], phi[j]);
          if (!r.empty()) pool.insert(std::move(r));
        }
    }
  }
}

std::vector<Clique> translate_cliques(const std::vector<Clique>& cliques,
                                      const Mapping& m) {
  const Schema& schema = m.source_schema();
  // Correspondence indices covering each source variable.
  std::vector<std::vector<std::size_t>> covering(schema.size());
  for (std::size_t ci = 0; ci < m.correspondences().size(); ++ci)
    for (std::uint32_t v : m.correspondences()[ci].source_vars)
      covering[v].push_back(ci);

  std::set<Clique> out;
  for (const Clique& raw : cliques) {
    const Clique c = canonical(raw, schema.size(), "translate_cliques");
    std::vector<std::size_t> radices;
    for (std::uint32_t v : c) {
      if (covering[v].empty())
        throw ContractError("translate_cliques: variable '" +
                            schema.var(v).name +
                            "' has no correspondence; eliminate it first");
      radices.push_back(covering[v].size());
    }
    product(radices, [&](const std::vector<std::size_t>& choice) {
      Clique t;
      for (std::size_t k = 0; k < c.size(); ++k) {
        const Correspondence& corr =
            m.correspondences()[covering[c[k]][choice[k]]];
        t.insert(t.end(), corr.target_vars.begin(), corr.target_vars.end());
      }
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      out.insert(std::move(t));
    });
  }
  return {out.begin(), out.end()};
}

Structure expand_cliques(const std::vector<Clique>& cliques,
                         const Schema& schema, std::uint64_t max_per_clique) {
  Structure structure;
  std::set<Clique> seen;
  for (const Clique& raw : cliques) {
    Clique c = canonical(raw, schema.size(), "expand_cliques");
    if (!seen.insert(c).second) continue;
    std::uint64_t cells = 1;
    for (std::uint32_t v : c) {
      cells *= schema.var(v).domain.size();
      if (cells > max_per_clique)
        throw ContractError("expand_cliques: clique expands past " +
                            std::to_string(max_per_clique) + " features");
    }
    std::vector<std::size_t> radices;
    for (std::uint32_t v : c) radices.push_back(schema.var(v).domain.size());
    product(radices, [&](const std::vector<std::size_t>& values) {
      std::vector<Literal> lits;
      for (std::size_t k = 0; k < c.size(); ++k)
        lits.push_back({c[k], static_cast<std::uint32_t>(values[k])});
      structure.features.emplace_back(std::move(lits), 0.0);
    });
  }
  return structure;
}

Structure translate_structure(const LogLinearModel& model, const Mapping& m,
                              double threshold) {
  if (!(model.schema() == m.source_schema()))
    throw ContractError("translate_structure: model schema is not the "
                        "mapping's source schema");
  std::vector<Clique> cliques = structure_to_cliques(model, threshold);
  cliques = eliminate_unmapped(std::move(cliques), m);
  cliques = translate_cliques(cliques, m);
  return expand_cliques(cliques, m.target_schema());
}

FoClique canonical_fo_clique(std::vector<fo::Atom> atoms) {
  if (atoms.empty()) throw ContractError("fo clique: empty atom set");
  // Order atoms by a name-blind key first so the variable numbering does
  // not depend on the input's variable names; exact ties fall back to the
  // current names, which keeps the result deterministic.
  auto blind_key = [](const fo::Atom& a) {
    std::string k = a.pred;
    for (const fo::Term& t : a.args) {
      k += '|';
      k += t.kind == fo::Term::Kind::kConst ? 'c' : 'v';
      k += t.type;
      if (t.kind == fo::Term::Kind::kConst) k += t.name;
    }
    return k;
  };
  std::sort(atoms.begin(), atoms.end(),
            [&](const fo::Atom& a, const fo::Atom& b) {
              const std::string ka = blind_key(a), kb = blind_key(b);
              return ka != kb ? ka < kb : a < b;
            });
  std::vector<fo::Atom> renamed = fo::standardize_apart(atoms, "v");
  std::sort(renamed.begin(), renamed.end());
  renamed.erase(std::unique(renamed.begin(), renamed.end()), renamed.end());
  return FoClique{std::move(renamed)};
}

std::vector<FoClique> fo_structure_to_cliques(
    const std::vector<FirstOrderFeature>& clauses, double threshold) {
  if (threshold < 0.0 || std::isnan(threshold))
    throw ContractError("fo_structure_to_cliques: threshold must be >= 0");
  std::set<FoClique> out;
  for (const FirstOrderFeature& clause : clauses) {
    if (!(std::abs(clause.weight) > threshold)) continue;
    std::vector<fo::Atom> atoms;
    for (const FoLiteral& lit : clause.literals) atoms.push_back(lit.atom);
    out.insert(canonical_fo_clique(std::move(atoms)));
  }
  return {out.begin(), out.end()};
}

namespace {

bool mentions_pred(const FoClique& c, const std::string& pred) {
  for (const fo::Atom& a : c.atoms)
    if (a.pred == pred) return true;
  return false;
}

std::vector<fo::Atom> drop_pred(std::vector<fo::Atom> atoms,
                                const std::string& pred) {
  std::erase_if(atoms, [&](const fo::Atom& a) { return a.pred == pred; });
  return atoms;
}

// Merge two cliques over an eliminated predicate: unify one of each side's
// `pred` atoms (all pairings), strip the predicate from the union.
void merge_pair(const FoClique& lhs, const FoClique& rhs,
                const std::string& pred, std::set<FoClique>& into) {
  const std::vector<fo::Atom> a = fo::standardize_apart(lhs.atoms, "s");
  const std::vector<fo::Atom> b = fo::standardize_apart(rhs.atoms, "t");
  for (const fo::Atom& pa : a) {
    if (pa.pred != pred) continue;
    for (const fo::Atom& pb : b) {
      if (pb.pred != pred) continue;
      fo::Substitution sub;
      if (!fo::unify_into(pa, pb, sub)) continue;
      std::vector<fo::Atom> merged;
      for (const fo::Atom& x : a) merged.push_back(fo::apply(x, sub));
      for (const fo::Atom& x : b) merged.push_back(fo::apply(x, sub));
      merged = drop_pred(std::move(merged), pred);
      if (!merged.empty()) into.insert(canonical_fo_clique(std::move(merged)));
    }
  }
}

}  // namespace

std::vector<FoClique> fo_eliminate_unmapped(std::vector<FoClique> cliques,
                                            const RelationalMapping& m) {
  std::set<FoClique> pool;
  for (FoClique& c : cliques)
    pool.insert(canonical_fo_clique(std::move(c.atoms)));

  while (true) {
    // Unmapped predicate in the fewest cliques; map order breaks ties by name.
    std::map<std::string, std::size_t> count;
    for (const FoClique& c : pool) {
      std::set<std::string> preds;
      for (const fo::Atom& a : c.atoms)
        if (!m.source_pred_mapped(a.pred)) preds.insert(a.pred);
      for (const std::string& p : preds) ++count[p];
    }
    std::string victim;
    for (const auto& [pred, n] : count)
      if (victim.empty() || n < count[victim]) victim = pred;
    if (victim.empty()) return {pool.begin(), pool.end()};

    std::vector<FoClique> phi;
    for (auto it = pool.begin(); it != pool.end();) {
      if (mentions_pred(*it, victim)) {
        phi.push_back(*it);
        it = pool.erase(it);
      } else {
        ++it;
      }
    }
    if (phi.size() == 1) {
      std::vector<fo::Atom> rest = drop_pred(phi[0].atoms, victim);
      if (!rest.empty()) pool.insert(canonical_fo_clique(std::move(rest)));
    } else {
      for (std::size_t i = 0; i < phi.size(); ++i)
        for (std::size_t j = i + 1; j < phi.size(); ++j)
          merge_pair(phi[i], phi[j], victim, pool);
    }
  }
}

std::vector<FoClique> fo_translate_cliques(const std::vector<FoClique>& cliques,
                                           const RelationalMapping& m) {
  std::set<FoClique> out;
  for (const FoClique& raw : cliques) {
    const FoClique c = canonical_fo_clique(raw.atoms);
    // Candidate (correspondence, source-atom position) pairs per atom.
    struct Candidate {
      std::size_t corr;
      std::size_t pos;
    };
    std::vector<std::vector<Candidate>> cands(c.atoms.size());
    for (std::size_t k = 0; k < c.atoms.size(); ++k) {
      for (std::size_t ci = 0; ci < m.correspondences.size(); ++ci) {
        const FoCorrespondence& fc = m.correspondences[ci];
        for (std::size_t pos = 0; pos < fc.source_atoms.size(); ++pos)
          if (fo::unify_atoms(c.atoms[k], fc.source_atoms[pos]).has_value())
            cands[k].push_back({ci, pos});
      }
      if (cands[k].empty())
        throw ContractError("fo_translate_cliques: atom '" + c.atoms[k].pred +
                            "' has no correspondence; eliminate it first");
    }
    std::vector<std::size_t> radices;
    for (const auto& v : cands) radices.push_back(v.size());
    product(radices, [&](const std::vector<std::size_t>& choice) {
      fo::Substitution sub;
      std::vector<fo::Atom> target;
      bool ok = true;
      for (std::size_t k = 0; k < c.atoms.size() && ok; ++k) {
        const Candidate& cd = cands[k][choice[k]];
        const FoCorrespondence& fc = m.correspondences[cd.corr];
        // Fresh correspondence instance per clique position, with source
        // and target renamed together so shared variables stay shared.
        std::vector<fo::Atom> inst = fc.source_atoms;
        inst.insert(inst.end(), fc.target_atoms.begin(), fc.target_atoms.end());
        inst = fo::standardize_apart(inst, "c" + std::to_string(k) + "_");
        ok = fo::unify_into(c.atoms[k], inst[cd.pos], sub);
        if (!ok) break;
        for (std::size_t t = fc.source_atoms.size(); t < inst.size(); ++t)
          target.push_back(inst[t]);
      }
      if (!ok) return;  // choices conflicted on a shared variable
      for (fo::Atom& a : target) a = fo::apply(a, sub);
      out.insert(canonical_fo_clique(std::move(target)));
    });
  }
  return {out.begin(), out.end()};
}

std::vector<FirstOrderFeature> fo_expand_cliques(
    const std::vector<FoClique>& cliques, std::uint64_t max_per_clique) {
  std::vector<FirstOrderFeature> out;
  std::set<FoClique> seen;
  for (const FoClique& raw : cliques) {
    FoClique c = canonical_fo_clique(raw.atoms);
    if (!seen.insert(c).second) continue;
    if (c.atoms.size() >= 64 ||
        (std::uint64_t{1} << c.atoms.size()) > max_per_clique)
      throw ContractError("fo_expand_cliques: clique expands past " +
                          std::to_string(max_per_clique) + " clauses");
    const std::uint64_t n = std::uint64_t{1} << c.atoms.size();
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      FirstOrderFeature clause;
      for (std::size_t k = 0; k < c.atoms.size(); ++k) {
        const bool negated = (mask >> (c.atoms.size() - 1 - k)) & 1u;
        clause.literals.push_back({c.atoms[k], negated});
      }
      out.push_back(std::move(clause));
    }
  }
  return out;
}

std::vector<FirstOrderFeature> translate_structure_fo(
    const std::vector<FirstOrderFeature>& clauses, const RelationalMapping& m,
    double threshold) {
  std::vector<FoClique> cliques = fo_structure_to_cliques(clauses, threshold);
  cliques = fo_eliminate_unmapped(std::move(cliques), m);
  cliques = fo_translate_cliques(cliques, m);
  return fo_expand_cliques(cliques);
}

}  // namespace kt
