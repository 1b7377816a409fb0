#include "kt/io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kt/error.hpp"

namespace kt {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

// Returns a reference: call sites iterate `get_field(...).items()`, and a
// by-value temporary would not outlive that range-for before C++23.
const json& get_field(const json& doc, const char* key,
                      const std::string& path) {
  if (!doc.is_object() || !doc.contains(key))
    fail(path, std::string("missing field '") + key + "'");
  return doc.at(key);
}

void check_version(const json& doc, const std::string& path) {
  if (get_field(doc, "format_version", path) != 1)
    fail(path, "unsupported format_version");
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

// ---- CSV (RFC 4180) ----

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_escape(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // true once the current row has any content
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) fail(path, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

json model_to_json(const LogLinearModel& model) {
  json features = json::array();
  for (const Feature& f : model.features()) {
    json lits = json::array();
    for (const Literal& lit : f.literals())
      lits.push_back({{"var", model.schema().var(lit.var).name},
                      {"value", model.schema().var(lit.var).domain[lit.value]}});
    features.push_back({{"literals", lits}, {"weight", f.weight()}});
  }
  return {{"format_version", 1},
          {"schema", schema_to_json(model.schema())},
          {"features", features}};
}

Literal literal_from_json(const json& v, const Schema& schema,
                          const std::string& path) {
  const std::string name = get_string(get_field(v, "var", path), path);
  const std::string value = get_string(get_field(v, "value", path), path);
  const auto idx = schema.index_of(name);
  if (!idx) fail(path, "unknown variable '" + name + "'");
  const auto& domain = schema.var(*idx).domain;
  const auto it = std::find(domain.begin(), domain.end(), value);
  if (it == domain.end())
    fail(path, "unknown value '" + value + "' for variable '" + name + "'");
  return {*idx, static_cast<std::uint32_t>(it - domain.begin())};
}

std::string join_tuple(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += '|';
    s += parts[i];
  }
  return s;
}

std::vector<std::string> split_tuple(const std::string& s, std::size_t n) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == '|') {
      parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(std::move(cur));
  if (n == 1) return {s};  // single-variable keys are taken verbatim
  return parts;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError(path + ": invalid JSON");
  return doc;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw Error(path + ": write failed");
}

json schema_to_json(const Schema& schema) {
  json vars = json::array();
  for (const Variable& v : schema.variables())
    vars.push_back({{"name", v.name}, {"domain", v.domain}});
  return {{"variables", vars}};
}

Schema schema_from_json(const json& doc) {
  const std::string ctx = "schema";
  std::vector<Variable> vars;
  for (const json& v : get_field(doc, "variables", ctx)) {
    Variable var;
    var.name = get_string(get_field(v, "name", ctx), ctx);
    for (const json& d : get_field(v, "domain", ctx))
      var.domain.push_back(get_string(d, ctx));
    vars.push_back(std::move(var));
  }
  try {
    return Schema(std::move(vars));
  } catch (const ContractError& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
}

void save_model(const std::string& path, const LogLinearModel& model,
                const json& extra) {
  json doc = model_to_json(model);
  for (const auto& [key, value] : extra.items()) {
    if (doc.contains(key))
      throw ContractError("save_model: extra key '" + key +
                          "' collides with the format");
    doc[key] = value;
  }
  write_json_file(path, doc);
}

LogLinearModel load_model(const std::string& path) {
  const json doc = read_json_file(path);
  check_version(doc, path);
  const Schema schema = schema_from_json(get_field(doc, "schema", path));
  std::vector<Feature> features;
  for (const json& f : get_field(doc, "features", path)) {
    std::vector<Literal> lits;
    for (const json& l : get_field(f, "literals", path))
      lits.push_back(literal_from_json(l, schema, path));
    const double w = get_number(get_field(f, "weight", path), path);
    try {
      features.emplace_back(std::move(lits), w);
    } catch (const ContractError& e) {
      fail(path, e.what());
    }
  }
  try {
    return LogLinearModel(schema, std::move(features));
  } catch (const ContractError& e) {
    fail(path, e.what());
  }
}

void save_dataset(const std::string& path, const Dataset& data) {
  validate_dataset(data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  const Schema& schema = data.schema;
  for (std::size_t i = 0; i < schema.size(); ++i)
    out << (i ? "," : "") << csv_escape(schema.var(i).name);
  out << "\n";
  for (const Assignment& a : data.instances) {
    for (std::size_t i = 0; i < schema.size(); ++i)
      out << (i ? "," : "") << csv_escape(schema.var(i).domain[a[i]]);
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
  write_json_file(path + ".provenance.json",
                  {{"format_version", 1},
                   {"schema", schema_to_json(schema)},
                   {"provenance", data.provenance}});
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_csv(buf.str(), path);
  if (rows.empty()) fail(path, "missing CSV header");
  const std::vector<std::string>& header = rows.front();

  Dataset data;
  const std::string sidecar = path + ".provenance.json";
  if (std::filesystem::exists(sidecar)) {
    const json doc = read_json_file(sidecar);
    check_version(doc, sidecar);
    data.schema = schema_from_json(get_field(doc, "schema", sidecar));
    data.provenance = doc.contains("provenance") ? doc.at("provenance")
                                                 : json::object();
    if (header.size() != data.schema.size())
      fail(path, "CSV header does not match the sidecar schema");
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] != data.schema.var(i).name)
        fail(path, "CSV column '" + header[i] + "' does not match the sidecar");
  } else {
    // No sidecar: reconstruct domains from the observed values.
    std::vector<std::set<std::string>> seen(header.size());
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != header.size()) fail(path, "ragged CSV row");
      for (std::size_t i = 0; i < header.size(); ++i)
        seen[i].insert(rows[r][i]);
    }
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (seen[i].size() < 2)
        fail(path, "column '" + header[i] +
                       "' has fewer than 2 distinct values and no sidecar "
                       "schema was found");
      vars.push_back({header[i], {seen[i].begin(), seen[i].end()}});
    }
    try {
      data.schema = Schema(std::move(vars));
    } catch (const ContractError& e) {
      fail(path, e.what());
    }
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != data.schema.size()) fail(path, "ragged CSV row");
    Assignment a(data.schema.size());
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      const auto& domain = data.schema.var(i).domain;
      const auto it = std::find(domain.begin(), domain.end(), rows[r][i]);
      if (it == domain.end())
        fail(path, "value '" + rows[r][i] + "' not in the domain of '" +
                       data.schema.var(i).name + "'");
      a[i] = static_cast<std::int32_t>(it - domain.begin());
    }
    data.instances.push_back(std::move(a));
  }
  return data;
}

void save_mapping(const std::string& path, const Mapping& m) {
  const Schema& src = m.source_schema();
  const Schema& tgt = m.target_schema();
  json corrs = json::array();
  for (const Correspondence& c : m.correspondences()) {
    json source_vars = json::array();
    for (std::uint32_t v : c.source_vars) source_vars.push_back(src.var(v).name);
    json target_vars = json::array();
    for (std::uint32_t v : c.target_vars) {
      target_vars.push_back(tgt.var(v).name);
      if (c.target_vars.size() > 1)
        for (const std::string& val : tgt.var(v).domain)
          if (val.find('|') != std::string::npos)
            throw ContractError(
                "save_mapping: multi-variable tuple values may not contain "
                "'|'");
    }
    const std::uint64_t n_rows = c.row_count(src);
    const std::uint64_t n_cols = c.col_count(tgt);
    json rows = json::array();
    for (std::uint64_t r = 0; r < n_rows; ++r) {
      json given = json::object();
      std::uint64_t rest = r;
      for (std::size_t i = c.source_vars.size(); i-- > 0;) {
        const Variable& v = src.var(c.source_vars[i]);
        given[v.name] = v.domain[rest % v.domain.size()];
        rest /= v.domain.size();
      }
      json dist = json::object();
      for (std::uint64_t col = 0; col < n_cols; ++col) {
        std::vector<std::string> parts;
        std::uint64_t c_rest = col;
        for (std::size_t i = c.target_vars.size(); i-- > 0;) {
          const Variable& v = tgt.var(c.target_vars[i]);
          parts.push_back(v.domain[c_rest % v.domain.size()]);
          c_rest /= v.domain.size();
        }
        std::reverse(parts.begin(), parts.end());
        dist[join_tuple(parts)] = c.table[r * n_cols + col];
      }
      rows.push_back({{"given", given}, {"dist", dist}});
    }
    corrs.push_back({{"source_vars", source_vars},
                     {"target_vars", target_vars},
                     {"rows", rows}});
  }
  write_json_file(path, {{"format_version", 1},
                         {"source_schema", schema_to_json(src)},
                         {"target_schema", schema_to_json(tgt)},
                         {"correspondences", corrs}});
}

Mapping load_mapping(const std::string& path) {
  const json doc = read_json_file(path);
  check_version(doc, path);
  const Schema src = schema_from_json(get_field(doc, "source_schema", path));
  const Schema tgt = schema_from_json(get_field(doc, "target_schema", path));

  std::vector<Correspondence> corrs;
  for (const json& cj : get_field(doc, "correspondences", path)) {
    Correspondence c;
    for (const json& v : get_field(cj, "source_vars", path)) {
      const std::string name = get_string(v, path);
      const auto idx = src.index_of(name);
      if (!idx) fail(path, "unknown source variable '" + name + "'");
      c.source_vars.push_back(*idx);
    }
    for (const json& v : get_field(cj, "target_vars", path)) {
      const std::string name = get_string(v, path);
      const auto idx = tgt.index_of(name);
      if (!idx) fail(path, "unknown target variable '" + name + "'");
      c.target_vars.push_back(*idx);
    }
    if (c.source_vars.empty() || c.target_vars.empty())
      fail(path, "correspondence with empty variable list");

    const std::uint64_t n_rows = c.row_count(src);
    const std::uint64_t n_cols = c.col_count(tgt);
    c.table.assign(n_rows * n_cols, 0.0);
    std::vector<bool> row_seen(n_rows, false);

    for (const json& rj : get_field(cj, "rows", path)) {
      const json given = get_field(rj, "given", path);
      if (!given.is_object() || given.size() != c.source_vars.size())
        fail(path, "row 'given' must assign exactly the source variables");
      std::uint64_t row = 0;
      for (std::uint32_t sv : c.source_vars) {
        const Variable& var = src.var(sv);
        if (!given.contains(var.name))
          fail(path, "row 'given' is missing variable '" + var.name + "'");
        const std::string value = get_string(given.at(var.name), path);
        const auto it = std::find(var.domain.begin(), var.domain.end(), value);
        if (it == var.domain.end())
          fail(path, "value '" + value + "' not in the domain of '" +
                         var.name + "'");
        row = row * var.domain.size() +
              static_cast<std::uint64_t>(it - var.domain.begin());
      }
      if (row_seen[row]) fail(path, "duplicate row in correspondence");
      row_seen[row] = true;

      double sum = 0.0;
      std::set<std::uint64_t> cols_seen;
      for (const auto& [key, pj] : get_field(rj, "dist", path).items()) {
        const auto parts = split_tuple(key, c.target_vars.size());
        if (parts.size() != c.target_vars.size())
          fail(path, "dist key '" + key + "' does not match the target arity");
        std::uint64_t col = 0;
        for (std::size_t i = 0; i < c.target_vars.size(); ++i) {
          const Variable& var = tgt.var(c.target_vars[i]);
          const auto it =
              std::find(var.domain.begin(), var.domain.end(), parts[i]);
          if (it == var.domain.end())
            fail(path, "dist key '" + key + "' uses a value outside the "
                       "domain of '" + var.name + "'");
          col = col * var.domain.size() +
                static_cast<std::uint64_t>(it - var.domain.begin());
        }
        if (!cols_seen.insert(col).second)
          fail(path, "duplicate dist key '" + key + "'");
        const double p = get_number(pj, path);
        if (p < 0.0) fail(path, "negative probability");
        c.table[row * n_cols + col] = p;
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        fail(path, "row not normalized: probabilities sum to " +
                       std::to_string(sum));
    }
    for (std::uint64_t r = 0; r < n_rows; ++r)
      if (!row_seen[r]) fail(path, "correspondence is missing a row");
    corrs.push_back(std::move(c));
  }
  try {
    return Mapping(src, tgt, std::move(corrs));
  } catch (const ContractError& e) {
    fail(path, e.what());
  }
}

void save_rules(const std::string& path, const std::vector<Rule>& rules,
                const Schema& schema) {
  json doc = json::array();
  auto lits_to_json = [&](const std::vector<Literal>& lits) {
    json arr = json::array();
    for (const Literal& lit : lits)
      arr.push_back({{"var", schema.var(lit.var).name},
                     {"value", schema.var(lit.var).domain[lit.value]}});
    return arr;
  };
  for (const Rule& r : rules)
    doc.push_back({{"antecedent", lits_to_json(r.antecedent)},
                   {"consequent", lits_to_json(r.consequent)},
                   {"confidence", r.confidence}});
  write_json_file(path, doc);
}

std::vector<Rule> load_rules(const std::string& path, const Schema& schema) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) fail(path, "rules file must be a JSON array");
  std::vector<Rule> rules;
  for (const json& rj : doc) {
    Rule r;
    for (const json& l : get_field(rj, "antecedent", path))
      r.antecedent.push_back(literal_from_json(l, schema, path));
    for (const json& l : get_field(rj, "consequent", path))
      r.consequent.push_back(literal_from_json(l, schema, path));
    r.confidence = get_number(get_field(rj, "confidence", path), path);
    rules.push_back(std::move(r));
  }
  return rules;
}

void save_mln(const std::string& path, const RelationalSchema& schema,
              const std::vector<FirstOrderFeature>& clauses) {
  json preds = json::array();
  for (const PredicateDecl& p : schema.predicates())
    preds.push_back({{"name", p.name}, {"arg_types", p.arg_types}});
  json cls = json::array();
  for (const FirstOrderFeature& c : clauses) {
    json atoms = json::array();
    for (const FoLiteral& lit : c.literals) {
      json args = json::array();
      for (const fo::Term& t : lit.atom.args) {
        const bool lower = !t.name.empty() && std::islower(
            static_cast<unsigned char>(t.name.front()));
        if ((t.kind == fo::Term::Kind::kVar) != lower)
          throw ContractError(
              "save_mln: variables must start lowercase and constants must "
              "not ('" + t.name + "')");
        args.push_back(t.name);
      }
      atoms.push_back(
          {{"pred", lit.atom.pred}, {"args", args}, {"negated", lit.negated}});
    }
    cls.push_back({{"weight", c.weight}, {"atoms", atoms}});
  }
  write_json_file(path, {{"format_version", 1},
                         {"types", schema.types()},
                         {"predicates", preds},
                         {"clauses", cls}});
}

MlnFile load_mln(const std::string& path) {
  const json doc = read_json_file(path);
  check_version(doc, path);
  std::vector<std::string> types;
  for (const json& t : get_field(doc, "types", path))
    types.push_back(get_string(t, path));
  std::vector<PredicateDecl> preds;
  for (const json& pj : get_field(doc, "predicates", path)) {
    PredicateDecl p;
    p.name = get_string(get_field(pj, "name", path), path);
    for (const json& t : get_field(pj, "arg_types", path))
      p.arg_types.push_back(get_string(t, path));
    preds.push_back(std::move(p));
  }
  MlnFile out;
  try {
    out.schema = RelationalSchema(std::move(types), std::move(preds));
  } catch (const ContractError& e) {
    fail(path, e.what());
  }
  for (const json& cj : get_field(doc, "clauses", path)) {
    FirstOrderFeature clause;
    clause.weight = get_number(get_field(cj, "weight", path), path);
    for (const json& aj : get_field(cj, "atoms", path)) {
      FoLiteral lit;
      lit.atom.pred = get_string(get_field(aj, "pred", path), path);
      lit.negated = aj.contains("negated") && aj.at("negated").is_boolean()
                        ? aj.at("negated").get<bool>()
                        : false;
      const PredicateDecl* decl = nullptr;
      try {
        decl = &out.schema.predicate(lit.atom.pred);
      } catch (const ContractError& e) {
        fail(path, e.what());
      }
      std::size_t pos = 0;
      for (const json& arg : get_field(aj, "args", path)) {
        if (pos >= decl->arg_types.size())
          fail(path, "too many arguments for " + lit.atom.pred);
        const std::string name = get_string(arg, path);
        if (name.empty()) fail(path, "empty atom argument");
        const bool lower =
            std::islower(static_cast<unsigned char>(name.front())) != 0;
        lit.atom.args.push_back(lower
                                    ? fo::var(name, decl->arg_types[pos])
                                    : fo::constant(name, decl->arg_types[pos]));
        ++pos;
      }
      if (pos != decl->arg_types.size())
        fail(path, "too few arguments for " + lit.atom.pred);
      clause.literals.push_back(std::move(lit));
    }
    out.clauses.push_back(std::move(clause));
  }
  return out;
}

void save_database(const std::string& path, const RelationalDatabase& db,
                   const DomainSizes& sizes) {
  json sizes_json = json::object();
  for (const auto& [type, n] : sizes) sizes_json[type] = n;
  write_json_file(path, {{"format_version", 1},
                         {"domain_sizes", sizes_json},
                         {"true_atoms", db.true_atoms}});
}

DatabaseFile load_database(const std::string& path) {
  const json doc = read_json_file(path);
  check_version(doc, path);
  DatabaseFile out;
  for (const auto& [type, n] : get_field(doc, "domain_sizes", path).items()) {
    if (!n.is_number_unsigned() || n.get<std::uint64_t>() < 1)
      fail(path, "domain size must be a positive integer");
    out.sizes[type] = n.get<std::uint32_t>();
  }
  for (const json& a : get_field(doc, "true_atoms", path))
    out.db.true_atoms.push_back(get_string(a, path));
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string model_hash(const LogLinearModel& model) {
  return fnv1a_hex(model_to_json(model).dump());
}

std::string mapping_hash(const Mapping& m) {
  json corrs = json::array();
  for (const Correspondence& c : m.correspondences())
    corrs.push_back({{"source_vars", c.source_vars},
                     {"target_vars", c.target_vars},
                     {"table", c.table}});
  const json doc = {{"source_schema", schema_to_json(m.source_schema())},
                    {"target_schema", schema_to_json(m.target_schema())},
                    {"correspondences", corrs}};
  return fnv1a_hex(doc.dump());
}

}  // namespace kt
