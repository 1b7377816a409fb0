#include "kt/relational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

#include "kt/conditionals.hpp"
#include "kt/error.hpp"

namespace kt {
namespace {

// Constants are upper-cased so they can never be mistaken for logical
// variables (which must start lowercase) in the MLN file format.
std::string constant_name(const std::string& type, std::uint32_t index) {
  std::string s = type + std::to_string(index);
  s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  return s;
}

std::string ground_atom_name(const std::string& pred,
                             const std::vector<std::string>& args) {
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i];
  }
  return s + ")";
}

std::uint32_t type_size(const DomainSizes& sizes, const std::string& type) {
  auto it = sizes.find(type);
  if (it == sizes.end())
    throw ContractError("grounding: no domain size for type '" + type + "'");
  if (it->second < 1) throw ContractError("grounding: domain size < 1");
  return it->second;
}

// Odometer over mixed-radix tuples, first position most significant.
// Calls fn(tuple) for every tuple; radices must be non-empty sizes >= 1.
template <typename Fn>
void for_each_tuple(const std::vector<std::uint32_t>& radices, Fn&& fn) {
  std::vector<std::uint32_t> tuple(radices.size(), 0);
  while (true) {
    fn(tuple);
    std::size_t i = tuple.size();
    while (i > 0) {
      --i;
      if (++tuple[i] < radices[i]) break;
      tuple[i] = 0;
      if (i == 0) return;
    }
    if (tuple.empty()) return;
  }
}

// Logical variables of a literal list in first-occurrence order; verifies
// consistent typing and declared types.
std::vector<fo::Term> clause_variables(const std::vector<FoLiteral>& literals,
                                       const RelationalSchema& schema) {
  std::vector<fo::Term> vars;
  for (const FoLiteral& lit : literals) {
    const PredicateDecl& decl = schema.predicate(lit.atom.pred);
    if (lit.atom.args.size() != decl.arg_types.size())
      throw ContractError("clause: arity mismatch for " + lit.atom.pred);
    for (std::size_t i = 0; i < lit.atom.args.size(); ++i) {
      const fo::Term& t = lit.atom.args[i];
      if (t.type != decl.arg_types[i])
        throw ContractError("clause: argument type mismatch in " + lit.atom.pred);
      if (t.kind != fo::Term::Kind::kVar) continue;
      auto same = [&](const fo::Term& v) { return v.name == t.name; };
      auto it = std::find_if(vars.begin(), vars.end(), same);
      if (it == vars.end())
        vars.push_back(t);
      else if (it->type != t.type)
        throw ContractError("clause: variable '" + t.name +
                            "' used with two types");
    }
  }
  return vars;
}

}  // namespace

RelationalSchema::RelationalSchema(std::vector<std::string> types,
                                   std::vector<PredicateDecl> predicates)
    : types_(std::move(types)), preds_(std::move(predicates)) {
  std::unordered_set<std::string> seen;
  for (const std::string& t : types_) {
    if (t.empty()) throw ContractError("relational schema: empty type name");
    if (!seen.insert(t).second)
      throw ContractError("relational schema: duplicate type '" + t + "'");
  }
  seen.clear();
  for (const PredicateDecl& p : preds_) {
    if (p.arg_types.empty())
      throw ContractError("relational schema: predicate arity must be >= 1");
    if (!seen.insert(p.name).second)
      throw ContractError("relational schema: duplicate predicate '" + p.name + "'");
    for (const std::string& t : p.arg_types)
      if (!has_type(t))
        throw ContractError("relational schema: undeclared type '" + t +
                            "' in predicate " + p.name);
  }
}

bool RelationalSchema::has_type(std::string_view name) const {
  return std::find(types_.begin(), types_.end(), name) != types_.end();
}

const PredicateDecl& RelationalSchema::predicate(std::string_view name) const {
  for (const PredicateDecl& p : preds_)
    if (p.name == name) return p;
  throw ContractError("relational schema: unknown predicate '" +
                      std::string(name) + "'");
}

fo::Atom RelationalSchema::atom(std::string_view pred) const {
  const PredicateDecl& decl = predicate(pred);
  fo::Atom a{decl.name, {}};
  for (std::size_t i = 0; i < decl.arg_types.size(); ++i)
    a.args.push_back(fo::var("x" + std::to_string(i), decl.arg_types[i]));
  return a;
}

Schema ground_schema(const RelationalSchema& schema, const DomainSizes& sizes) {
  std::vector<Variable> vars;
  for (const PredicateDecl& p : schema.predicates()) {
    std::vector<std::uint32_t> radices;
    for (const std::string& t : p.arg_types)
      radices.push_back(type_size(sizes, t));
    for_each_tuple(radices, [&](const std::vector<std::uint32_t>& tuple) {
      std::vector<std::string> args;
      for (std::size_t i = 0; i < tuple.size(); ++i)
        args.push_back(constant_name(p.arg_types[i], tuple[i]));
      vars.push_back({ground_atom_name(p.name, args), {"false", "true"}});
    });
  }
  return Schema(std::move(vars));
}

Grounding ground(const RelationalSchema& schema,
                 const std::vector<FirstOrderFeature>& clauses,
                 const DomainSizes& sizes, std::uint64_t max_groundings) {
  Schema gs = ground_schema(schema, sizes);

  Grounding g{LogLinearModel(gs, {}), {}, {}};
  g.atom_pred.reserve(gs.size());
  for (std::uint32_t pi = 0; pi < schema.predicates().size(); ++pi) {
    const PredicateDecl& p = schema.predicates()[pi];
    std::uint64_t count = 1;
    for (const std::string& t : p.arg_types) count *= type_size(sizes, t);
    g.pred_groundings.push_back(count);
    for (std::uint64_t k = 0; k < count; ++k) g.atom_pred.push_back(pi);
  }

  std::vector<Feature> features;
  for (const FirstOrderFeature& clause : clauses) {
    if (clause.literals.empty())
      throw ContractError("grounding: empty clause");
    const std::vector<fo::Term> vars = clause_variables(clause.literals, schema);
    std::vector<std::uint32_t> radices;
    std::uint64_t count = 1;
    for (const fo::Term& v : vars) {
      radices.push_back(type_size(sizes, v.type));
      count *= radices.back();
      if (count > max_groundings)
        throw ContractError("grounding: clause exceeds grounding cap");
    }
    for_each_tuple(radices, [&](const std::vector<std::uint32_t>& tuple) {
      fo::Substitution sub;
      for (std::size_t i = 0; i < vars.size(); ++i)
        sub.emplace(vars[i].name,
                    fo::constant(constant_name(vars[i].type, tuple[i]),
                                 vars[i].type));
      std::vector<Literal> lits;
      bool contradiction = false;
      for (const FoLiteral& lit : clause.literals) {
        const fo::Atom a = fo::apply(lit.atom, sub);
        std::vector<std::string> args;
        for (const fo::Term& t : a.args) {
          if (t.kind != fo::Term::Kind::kConst)
            throw ContractError("grounding: unbound constant in clause atom");
          args.push_back(t.name);
        }
        const std::uint32_t var = gs.require(ground_atom_name(a.pred, args));
        const std::uint32_t value = lit.negated ? 0u : 1u;
        auto same_var = [&](const Literal& l) { return l.var == var; };
        auto it = std::find_if(lits.begin(), lits.end(), same_var);
        if (it == lits.end())
          lits.push_back({var, value});
        else if (it->value != value)
          contradiction = true;  // atom required both true and false
      }
      if (!contradiction) features.emplace_back(std::move(lits), clause.weight);
    });
  }
  g.model = LogLinearModel(std::move(gs), std::move(features));
  return g;
}

Assignment db_to_assignment(const RelationalDatabase& db, const Schema& ground) {
  Assignment a(ground.size(), 0);
  for (const std::string& atom : db.true_atoms) a[ground.require(atom)] = 1;
  return a;
}

RelationalDatabase assignment_to_db(const Assignment& a, const Schema& ground) {
  if (a.size() != ground.size())
    throw ContractError("assignment_to_db: size mismatch");
  RelationalDatabase db;
  for (std::uint32_t v = 0; v < ground.size(); ++v)
    if (a[v] == 1) db.true_atoms.push_back(ground.var(v).name);
  return db;
}

namespace {

WpllReport wpll_with(const Grounding& g, const LocalConditionals& lc,
                     const Assignment& instance) {
  if (instance.size() != g.model.schema().size())
    throw ContractError("wpll: instance does not cover all ground atoms");
  WpllReport report;
  report.per_predicate.assign(g.pred_groundings.size(), 0.0);
  for (std::uint32_t v = 0; v < g.model.schema().size(); ++v)
    report.per_predicate[g.atom_pred[v]] += lc.log_conditional(instance, v);
  for (std::size_t r = 0; r < report.per_predicate.size(); ++r) {
    report.per_predicate[r] /= static_cast<double>(g.pred_groundings[r]);
    report.total += report.per_predicate[r];
  }
  return report;
}

}  // namespace

WpllReport wpll(const Grounding& g, const Assignment& instance) {
  LocalConditionals lc(g.model.schema(), g.model.features());
  return wpll_with(g, lc, instance);
}

double wpll(const Grounding& g, const RelationalDatabase& db) {
  return wpll(g, db_to_assignment(db, g.model.schema())).total;
}

double wpll_mean(const Grounding& g, const Dataset& data) {
  if (!(data.schema == g.model.schema()))
    throw ContractError("wpll_mean: dataset schema is not the ground schema");
  if (data.instances.empty()) throw ContractError("wpll_mean: empty dataset");
  LocalConditionals lc(g.model.schema(), g.model.features());
  double total = 0.0;
  for (const Assignment& a : data.instances)
    total += wpll_with(g, lc, a).total;
  return total / static_cast<double>(data.instances.size());
}

DomainSizes constants_heuristic(const std::vector<DomainSizes>& training_sizes,
                                double scalar) {
  if (training_sizes.empty())
    throw ContractError("constants_heuristic: no training databases");
  if (!(scalar > 0.0) || scalar > 1.0)
    throw ContractError("constants_heuristic: scalar must be in (0, 1]");
  for (const DomainSizes& s : training_sizes)
    for (const auto& [type, n] : training_sizes.front())
      if (s.count(type) != 1 || s.size() != training_sizes.front().size())
        throw ContractError("constants_heuristic: inconsistent type sets");
  DomainSizes out;
  for (const auto& [type, n0] : training_sizes.front()) {
    double sum = 0.0;
    for (const DomainSizes& s : training_sizes)
      sum += static_cast<double>(s.at(type));
    const double scaled = scalar * sum / static_cast<double>(training_sizes.size());
    const double rounded = std::floor(scaled + 0.5);  // round half up
    out[type] = static_cast<std::uint32_t>(std::max(1.0, rounded));
  }
  return out;
}

bool RelationalMapping::source_pred_mapped(std::string_view pred) const {
  for (const FoCorrespondence& c : correspondences)
    for (const fo::Atom& a : c.source_atoms)
      if (a.pred == pred) return true;
  return false;
}

Mapping expand_mapping(const RelationalMapping& m, const DomainSizes& sizes) {
  const Schema src = ground_schema(m.source, sizes);
  const Schema tgt = ground_schema(m.target, sizes);

  std::vector<Correspondence> corrs;
  for (const FoCorrespondence& fc : m.correspondences) {
    if (fc.source_atoms.empty() || fc.target_atoms.empty())
      throw ContractError("expand_mapping: correspondence with empty atom set");
    // Shared logical variables over both sides, first occurrence order.
    std::vector<FoLiteral> all;
    for (const fo::Atom& a : fc.source_atoms) all.push_back({a, false});
    std::vector<fo::Term> vars = clause_variables(all, m.source);
    for (const fo::Atom& a : fc.target_atoms) {
      std::vector<FoLiteral> one{{a, false}};
      for (const fo::Term& v : clause_variables(one, m.target)) {
        auto same = [&](const fo::Term& u) { return u.name == v.name; };
        auto it = std::find_if(vars.begin(), vars.end(), same);
        if (it == vars.end())
          vars.push_back(v);
        else if (it->type != v.type)
          throw ContractError("expand_mapping: variable typed inconsistently");
      }
    }
    std::vector<std::uint32_t> radices;
    for (const fo::Term& v : vars) radices.push_back(type_size(sizes, v.type));

    for_each_tuple(radices, [&](const std::vector<std::uint32_t>& tuple) {
      fo::Substitution sub;
      for (std::size_t i = 0; i < vars.size(); ++i)
        sub.emplace(vars[i].name,
                    fo::constant(constant_name(vars[i].type, tuple[i]),
                                 vars[i].type));
      auto ground_side = [&](const std::vector<fo::Atom>& atoms,
                             const Schema& schema) {
        std::vector<std::uint32_t> out;
        for (const fo::Atom& a : atoms) {
          const fo::Atom ga = fo::apply(a, sub);
          std::vector<std::string> args;
          for (const fo::Term& t : ga.args) args.push_back(t.name);
          out.push_back(schema.require(ground_atom_name(ga.pred, args)));
        }
        return out;
      };
      Correspondence c;
      c.source_vars = ground_side(fc.source_atoms, src);
      c.target_vars = ground_side(fc.target_atoms, tgt);
      c.table = fc.table;
      // Tuples collapsing two atoms of one side onto the same ground atom
      // have no well-defined CPT cell; leave those groundings unmapped.
      auto has_dup = [](std::vector<std::uint32_t> v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
      };
      if (!has_dup(c.source_vars) && !has_dup(c.target_vars))
        corrs.push_back(std::move(c));
    });
  }
  return Mapping(src, tgt, std::move(corrs));
}

}  // namespace kt
