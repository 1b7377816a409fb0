#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kt/import.hpp"
#include "kt/mapping.hpp"
#include "kt/model.hpp"
#include "kt/relational.hpp"

namespace kt {

/// Throws ParseError (with the path in the message) on unreadable or
/// malformed JSON.
nlohmann::json read_json_file(const std::string& path);
/// Pretty-printed with sorted keys (nlohmann objects are key-ordered), so
/// identical documents serialize byte-identically.
void write_json_file(const std::string& path, const nlohmann::json& doc);

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& doc);

/// Model JSON, format_version 1:
///   {format_version, schema: {variables: [{name, domain}]},
///    features: [{literals: [{var, value}], weight}]}
/// Literals are stored by name. `extra` keys (e.g. a learn_config block)
/// are merged at the top level.
void save_model(const std::string& path, const LogLinearModel& model,
                const nlohmann::json& extra = nlohmann::json::object());
LogLinearModel load_model(const std::string& path);

/// Dataset CSV (RFC 4180 quoting): header = variable names, one assignment
/// per row as domain values. A sidecar <path>.provenance.json carries
/// {format_version, schema, provenance}.
void save_dataset(const std::string& path, const Dataset& data);
/// Reads the sidecar when present; otherwise the schema is inferred from
/// the column contents (domains = sorted distinct values).
Dataset load_dataset(const std::string& path);

/// Mapping JSON: {format_version, source_schema, target_schema,
/// correspondences: [{source_vars, target_vars,
///   rows: [{given: {var: value}, dist: {"t1|t2": p}}]}]}.
/// The loader requires every row exactly once and row sums within 1e-9 of 1.
void save_mapping(const std::string& path, const Mapping& m);
Mapping load_mapping(const std::string& path);

/// Rules file: bare JSON array of
///   {antecedent: [{var, value}], consequent: [{var, value}], confidence}.
void save_rules(const std::string& path, const std::vector<Rule>& rules,
                const Schema& schema);
std::vector<Rule> load_rules(const std::string& path, const Schema& schema);

/// MLN JSON: {format_version, types, predicates: [{name, arg_types}],
/// clauses: [{weight, atoms: [{pred, args, negated}]}]}. Argument strings
/// starting with a lowercase letter are logical variables; anything else
/// is a constant.
struct MlnFile {
  RelationalSchema schema;
  std::vector<FirstOrderFeature> clauses;
};
void save_mln(const std::string& path, const RelationalSchema& schema,
              const std::vector<FirstOrderFeature>& clauses);
MlnFile load_mln(const std::string& path);

/// Database JSON: {format_version, domain_sizes: {type: n},
/// true_atoms: ["Pred(c0,c1)", ...]} — closed world.
struct DatabaseFile {
  RelationalDatabase db;
  DomainSizes sizes;
};
void save_database(const std::string& path, const RelationalDatabase& db,
                   const DomainSizes& sizes);
DatabaseFile load_database(const std::string& path);

/// 64-bit FNV-1a as fixed-width hex; stable across platforms.
std::string fnv1a_hex(std::string_view bytes);
std::string model_hash(const LogLinearModel& model);
std::string mapping_hash(const Mapping& m);

}  // namespace kt
