// kt: knowledge translation toolkit CLI.
//
// Subcommands: translate, learn, sample, ground, eval, synth, pipeline.
// Every command exits 0 only when it fully succeeded.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kt/error.hpp"
#include "kt/io.hpp"
#include "kt/pipeline.hpp"
#include "kt/rng.hpp"
#include "kt/sampling.hpp"
#include "kt/synthetic.hpp"
#include "kt/translate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamEvalTranslate = 0x65766131;

struct GlobalArgs {
  std::optional<std::uint64_t> seed;  // overrides config/command seeds
  std::string config_path;            // consumed by `pipeline`
};

kt::Structure structure_from_model_file(const std::string& path) {
  kt::Structure s;
  s.features = kt::load_model(path).features();
  return s;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) grid.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return grid;
}

// ---- translate ----

struct TranslateArgs {
  std::string model, mapping, out;
  std::string method = "TS-KS";
  std::uint64_t n_samples = 1000;
  double theta = 0.1;
  double l2 = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 1000, thin = 10;
  std::string cache_dir;
};

int cmd_translate(const TranslateArgs& a, const GlobalArgs& g) {
  const kt::Method method = kt::parse_method(a.method);
  if (!kt::is_ks_method(method))
    throw kt::ContractError("translate runs the K_S methods only (ES-KS, "
                            "LS-KS, TS-KS); use `kt learn` for data methods");
  const kt::LogLinearModel source = kt::load_model(a.model);
  const kt::Mapping mapping = kt::load_mapping(a.mapping);

  kt::MethodInputs in;
  in.source_model = &source;
  in.mapping = &mapping;
  kt::RunOptions opt;
  opt.n_samples = a.n_samples;
  opt.seed = g.seed.value_or(a.seed);
  opt.theta = a.theta;
  opt.learn.l2_prior = a.l2;
  opt.burn_in = a.burn_in;
  opt.thin = a.thin;
  opt.cache_dir = a.cache_dir;

  const kt::RunResult result = kt::run_method(method, in, opt);
  kt::save_model(a.out, result.model, {{"learn_config", result.info}});
  std::cout << "wrote " << a.out << " (" << result.model.features().size()
            << " features)\n";
  return 0;
}

// ---- learn ----

struct LearnArgs {
  std::string data, out;
  std::string structure = "dtsl";  // dtsl | empty | <model.json>
  double l2 = 1.0;
  std::string cv_grid;
  double kappa = 1.0, prior = 2.0;
  std::uint32_t mincount = 16;
  std::uint64_t seed = 0;
};

int cmd_learn(const LearnArgs& a, const GlobalArgs& g) {
  const kt::Dataset data = kt::load_dataset(a.data);
  kt::LearnConfig cfg;
  cfg.l2_prior = a.l2;
  cfg.dtsl = {a.kappa, a.prior, a.mincount};

  kt::Structure structure;
  if (a.structure == "dtsl")
    structure = kt::learn_structure_dtsl(data, cfg.dtsl);
  else if (a.structure == "empty")
    structure = kt::empty_structure(data.schema);
  else
    structure = structure_from_model_file(a.structure);

  if (!a.cv_grid.empty()) {
    const std::vector<double> grid = parse_grid(a.cv_grid);
    cfg.l2_prior = kt::cross_validate_l2(structure, data, grid,
                                         g.seed.value_or(a.seed), cfg);
    std::cout << "cross-validated l2 = " << cfg.l2_prior << "\n";
  }

  const kt::LogLinearModel model = kt::learn_weights(structure, data, cfg);
  json info = {{"structure", a.structure},
               {"l2_prior", cfg.l2_prior},
               {"n_instances", data.instances.size()}};
  kt::save_model(a.out, model, {{"learn_config", info}});
  std::cout << "wrote " << a.out << " (" << model.features().size()
            << " features)\n";
  return 0;
}

// ---- sample ----

struct SampleArgs {
  std::string model, mapping, out;
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 1000, thin = 10;
  std::string cache_dir;
};

int cmd_sample(const SampleArgs& a, const GlobalArgs& g) {
  const kt::LogLinearModel model = kt::load_model(a.model);
  kt::Dataset data;
  if (!a.mapping.empty()) {
    const kt::Mapping mapping = kt::load_mapping(a.mapping);
    kt::RunOptions opt;
    opt.n_samples = a.n_samples;
    opt.seed = g.seed.value_or(a.seed);
    opt.burn_in = a.burn_in;
    opt.thin = a.thin;
    opt.cache_dir = a.cache_dir;
    data = kt::sample_ks_data(model, mapping, opt);
  } else {
    kt::SamplerConfig sc;
    sc.n_samples = a.n_samples;
    sc.burn_in = a.burn_in;
    sc.thin = a.thin;
    sc.seed = g.seed.value_or(a.seed);
    data = kt::gibbs_sample(model, sc);
    data.provenance["model_hash"] = kt::model_hash(model);
  }
  kt::save_dataset(a.out, data);
  std::cout << "wrote " << data.instances.size() << " samples to " << a.out
            << "\n";
  return 0;
}

// ---- ground ----

struct GroundArgs {
  std::string mln, out;
  std::vector<std::string> sizes;  // type=N
  std::vector<std::string> from_dbs;
  double scalar = 0.5;
};

int cmd_ground(const GroundArgs& a) {
  const kt::MlnFile mln = kt::load_mln(a.mln);
  kt::DomainSizes sizes;
  if (!a.from_dbs.empty()) {
    std::vector<kt::DomainSizes> training;
    for (const std::string& path : a.from_dbs)
      training.push_back(kt::load_database(path).sizes);
    sizes = kt::constants_heuristic(training, a.scalar);
  }
  for (const std::string& spec : a.sizes) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw kt::ContractError("--size expects type=N, got '" + spec + "'");
    sizes[spec.substr(0, eq)] =
        static_cast<std::uint32_t>(std::stoul(spec.substr(eq + 1)));
  }
  if (sizes.empty())
    throw kt::ContractError("ground: provide --size or --from-dbs");

  const kt::Grounding g = kt::ground(mln.schema, mln.clauses, sizes);
  json sizes_json = json::object();
  for (const auto& [type, n] : sizes) sizes_json[type] = n;
  kt::save_model(a.out, g.model,
                 {{"grounding", {{"domain_sizes", sizes_json},
                                 {"atom_pred", g.atom_pred},
                                 {"pred_groundings", g.pred_groundings}}}});
  std::cout << "wrote " << a.out << " (" << g.model.schema().size()
            << " ground atoms, " << g.model.features().size()
            << " ground features)\n";
  return 0;
}

// ---- eval ----

kt::Grounding bookkeeping_from_model_file(const std::string& path,
                                          const kt::LogLinearModel& model) {
  const json doc = kt::read_json_file(path);
  if (!doc.contains("grounding"))
    throw kt::ParseError(path + ": no 'grounding' block (produce it with "
                         "`kt ground`)");
  const json& g = doc.at("grounding");
  kt::Grounding out;
  out.model = model;
  for (const json& p : g.at("atom_pred"))
    out.atom_pred.push_back(p.get<std::uint32_t>());
  for (const json& p : g.at("pred_groundings"))
    out.pred_groundings.push_back(p.get<std::uint64_t>());
  if (out.atom_pred.size() != model.schema().size())
    throw kt::ParseError(path + ": grounding block does not match the model");
  return out;
}

struct EvalArgs {
  std::string model, target_test, translated_test, out, grounding;
};

int cmd_eval(const EvalArgs& a) {
  const kt::LogLinearModel model = kt::load_model(a.model);
  const kt::Dataset target_test = kt::load_dataset(a.target_test);
  const kt::Dataset translated_test = kt::load_dataset(a.translated_test);
  json report;
  if (a.grounding.empty()) {
    report = kt::evaluate(model, target_test, translated_test);
  } else {
    const kt::Grounding bk = bookkeeping_from_model_file(a.grounding, model);
    report = kt::evaluate_relational(model, bk, target_test, translated_test);
  }
  report["format_version"] = 1;
  report["model_hash"] = kt::model_hash(model);
  if (!a.out.empty()) kt::write_json_file(a.out, report);
  std::cout << report.dump(2) << "\n";
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string kind, out_dir;
  std::uint64_t seed = 1;
  double noise = 0.1;
  bool no_mismatch = false;
  std::uint32_t attributes = 4, bins = 5;
  std::uint32_t n_train = 1000, n_test = 500;
  double scalar = 0.5;
  std::uint32_t train_dbs = 40, test_dbs = 10;
};

int cmd_synth(const SynthArgs& a, const GlobalArgs& g) {
  fs::create_directories(a.out_dir);
  const auto path = [&](const char* name) {
    return (fs::path(a.out_dir) / name).string();
  };
  json manifest = {{"format_version", 1}, {"kind", a.kind}};

  if (a.kind == "nba") {
    kt::SyntheticSpec spec;
    spec.seed = g.seed.value_or(a.seed);
    spec.mapping_noise = a.noise;
    spec.granularity_mismatch = !a.no_mismatch;
    spec.n_attributes = a.attributes;
    spec.n_bins = a.bins;
    spec.n_source_train = a.n_train;
    spec.n_source_test = a.n_test;
    spec.n_target_train = a.n_train;
    spec.n_target_test = a.n_test;
    const kt::SyntheticTask task = kt::make_synthetic_task(spec);

    kt::save_model(path("source_model.json"), task.source_model);
    kt::save_mapping(path("mapping.json"), task.mapping);
    kt::save_dataset(path("source_train.csv"), task.source_train);
    kt::save_dataset(path("source_test.csv"), task.source_test);
    kt::save_dataset(path("target_train.csv"), task.target_train);
    kt::save_dataset(path("target_test.csv"), task.target_test);
    kt::save_model(path("manual_structure.json"),
                   kt::LogLinearModel(task.mapping.target_schema(),
                                      task.manual_structure.features));
    manifest["seed"] = spec.seed;
    manifest["mapping_noise"] = spec.mapping_noise;
    manifest["granularity_mismatch"] = spec.granularity_mismatch;
    manifest["files"] = {"source_model.json",  "mapping.json",
                         "source_train.csv",   "source_test.csv",
                         "target_train.csv",   "target_test.csv",
                         "manual_structure.json"};
  } else if (a.kind == "university") {
    kt::RelationalSpec spec;
    spec.seed = g.seed.value_or(a.seed);
    spec.mapping_noise = a.noise;
    spec.scalar = a.scalar;
    spec.n_train_dbs = a.train_dbs;
    spec.n_test_dbs = a.test_dbs;
    const kt::RelationalTask task = kt::make_relational_task(spec);

    kt::save_mln(path("source_mln.json"), task.source_schema, task.source_mln);
    json sizes_json = json::object();
    for (const auto& [type, n] : task.sizes) sizes_json[type] = n;
    const kt::Grounding& sg = task.source_grounding;
    kt::save_model(path("ground_source_model.json"), sg.model,
                   {{"grounding", {{"domain_sizes", sizes_json},
                                   {"atom_pred", sg.atom_pred},
                                   {"pred_groundings", sg.pred_groundings}}}});
    const kt::Grounding& tg = task.target_grounding;
    kt::save_model(path("ground_target_skeleton.json"), tg.model,
                   {{"grounding", {{"domain_sizes", sizes_json},
                                   {"atom_pred", tg.atom_pred},
                                   {"pred_groundings", tg.pred_groundings}}}});
    kt::save_mapping(path("mapping.json"), task.ground_mapping);
    kt::save_dataset(path("source_train.csv"), task.source_train);
    kt::save_dataset(path("source_test.csv"), task.source_test);
    kt::save_dataset(path("target_train.csv"), task.target_train);
    kt::save_dataset(path("target_test.csv"), task.target_test);
    kt::save_model(path("manual_structure.json"),
                   kt::LogLinearModel(tg.model.schema(),
                                      task.manual_structure.features));
    manifest["seed"] = spec.seed;
    manifest["mapping_noise"] = spec.mapping_noise;
    manifest["scalar"] = spec.scalar;
    manifest["domain_sizes"] = sizes_json;
    manifest["files"] = {"source_mln.json",     "ground_source_model.json",
                         "ground_target_skeleton.json", "mapping.json",
                         "source_train.csv",    "source_test.csv",
                         "target_train.csv",    "target_test.csv",
                         "manual_structure.json"};
  } else {
    throw kt::ContractError("synth: --kind must be nba or university");
  }
  kt::write_json_file(path("task.json"), manifest);
  std::cout << "wrote task bundle to " << a.out_dir << "\n";
  return 0;
}

// ---- pipeline ----

struct PipelineArgs {
  std::string config, out_dir;
};

json jpath(const json& cfg, const char* key) {
  return cfg.contains(key) ? cfg.at(key) : json();
}

int cmd_pipeline(const PipelineArgs& a, const GlobalArgs& g) {
  const std::string config_path =
      !a.config.empty() ? a.config : g.config_path;
  if (config_path.empty())
    throw kt::ContractError("pipeline requires --config");
  const json cfg = kt::read_json_file(config_path);

  std::vector<kt::Method> methods;
  for (const json& m : cfg.at("methods"))
    methods.push_back(kt::parse_method(m.get<std::string>()));
  if (methods.empty()) throw kt::ContractError("pipeline: no methods listed");

  std::vector<std::uint64_t> sample_counts;
  if (cfg.contains("n_samples") && cfg.at("n_samples").is_array())
    for (const json& n : cfg.at("n_samples"))
      sample_counts.push_back(n.get<std::uint64_t>());
  else
    sample_counts.push_back(
        cfg.contains("n_samples") ? cfg.at("n_samples").get<std::uint64_t>()
                                  : 1000);

  const bool relational = cfg.contains("relational") &&
                          cfg.at("relational").get<bool>();

  kt::RunOptions base;
  base.seed = g.seed.value_or(cfg.contains("seed")
                                  ? cfg.at("seed").get<std::uint64_t>()
                                  : 0);
  if (cfg.contains("theta")) base.theta = cfg.at("theta").get<double>();
  if (relational) base.learn.l2_prior = 10.0;  // relational-mode default
  if (cfg.contains("l2")) base.learn.l2_prior = cfg.at("l2").get<double>();
  if (cfg.contains("burn_in")) base.burn_in = cfg.at("burn_in").get<std::uint64_t>();
  if (cfg.contains("thin")) base.thin = cfg.at("thin").get<std::uint64_t>();
  if (cfg.contains("mincount"))
    base.learn.dtsl.mincount = cfg.at("mincount").get<std::uint32_t>();
  if (cfg.contains("cache_dir"))
    base.cache_dir = cfg.at("cache_dir").get<std::string>();

  // Load only what the selected methods and the evaluation actually need —
  // the K_S methods must run with no dataset files at all.
  bool need_ks = false, need_ds = false, need_dt = false, need_ms = false;
  for (kt::Method m : methods) {
    need_ks |= kt::is_ks_method(m);
    need_ds |= m == kt::Method::kLsDs || m == kt::Method::kMsDs;
    need_dt |= m == kt::Method::kLsDt || m == kt::Method::kMsDt;
    need_ms |= m == kt::Method::kMsDs || m == kt::Method::kMsDt;
  }
  auto path_of = [&](const char* key) -> std::string {
    const json v = jpath(cfg, key);
    return v.is_string() ? v.get<std::string>() : "";
  };

  std::optional<kt::LogLinearModel> source_model;
  std::optional<kt::Mapping> mapping;
  std::optional<kt::Dataset> source_data, target_train;
  std::optional<kt::Structure> manual_structure;

  const bool derive_translated = path_of("translated_test").empty();
  if (need_ks || need_ds || derive_translated) {
    const std::string p = path_of("mapping");
    if (p.empty()) throw kt::ContractError("pipeline: config needs 'mapping'");
    mapping = kt::load_mapping(p);
  }
  if (need_ks) {
    const std::string p = path_of("source_model");
    if (p.empty())
      throw kt::ContractError("pipeline: config needs 'source_model'");
    source_model = kt::load_model(p);
  }
  if (need_ds) {
    const std::string p = path_of("source_data");
    if (p.empty())
      throw kt::ContractError(
          "pipeline: D_S methods need 'source_data' in the config");
    source_data = kt::load_dataset(p);
  }
  if (need_dt) {
    const std::string p = path_of("target_train");
    if (p.empty())
      throw kt::ContractError(
          "pipeline: D_T methods need 'target_train' in the config");
    target_train = kt::load_dataset(p);
  }
  if (need_ms) {
    const std::string p = path_of("manual_structure");
    if (p.empty())
      throw kt::ContractError(
          "pipeline: MS methods need 'manual_structure' in the config");
    manual_structure = structure_from_model_file(p);
  }

  const std::string target_test_path = path_of("target_test");
  if (target_test_path.empty())
    throw kt::ContractError("pipeline: config needs 'target_test'");
  const kt::Dataset target_test = kt::load_dataset(target_test_path);

  kt::Dataset translated_test;
  if (!derive_translated) {
    translated_test = kt::load_dataset(path_of("translated_test"));
  } else {
    const std::string p = path_of("source_test");
    if (p.empty())
      throw kt::ContractError(
          "pipeline: provide 'translated_test' or 'source_test'");
    const kt::Dataset source_test = kt::load_dataset(p);
    translated_test = kt::translate_dataset(
        *mapping, source_test, source_test.instances.size(),
        kt::derive_seed(base.seed, kStreamEvalTranslate));
  }

  std::optional<kt::Grounding> bookkeeping;

  fs::create_directories(a.out_dir);
  std::ofstream log((fs::path(a.out_dir) / "log.txt").string());
  json combined = {{"format_version", 1}, {"config", cfg}, {"runs", json::array()}};
  std::ofstream summary((fs::path(a.out_dir) / "summary.csv").string());
  summary << "method";
  for (std::uint64_t n : sample_counts) summary << ",N=" << n;
  summary << "\n";

  for (kt::Method method : methods) {
    summary << kt::to_string(method);
    for (std::uint64_t n : sample_counts) {
      kt::RunOptions opt = base;
      opt.n_samples = n;

      kt::MethodInputs in;
      if (source_model) in.source_model = &*source_model;
      if (mapping) in.mapping = &*mapping;
      if (source_data) in.source_data = &*source_data;
      if (target_train) in.target_train = &*target_train;
      if (manual_structure) in.manual_structure = &*manual_structure;

      kt::RunResult run = kt::run_method(method, in, opt);

      json eval;
      double summary_metric;
      if (relational) {
        if (!bookkeeping)
          bookkeeping = bookkeeping_from_model_file(path_of("grounding"),
                                                    run.model);
        kt::Grounding bk{run.model, bookkeeping->atom_pred,
                         bookkeeping->pred_groundings};
        eval = kt::evaluate_relational(run.model, bk, target_test,
                                       translated_test);
        summary_metric =
            eval.at("wpll_translated_source_test").at("total").get<double>();
      } else {
        eval = kt::evaluate(run.model, target_test, translated_test);
        summary_metric = eval.at("pll_translated_source_test").get<double>();
      }

      const std::string run_name =
          kt::to_string(method) + "-N" + std::to_string(n);
      const fs::path run_dir = fs::path(a.out_dir) / run_name;
      fs::create_directories(run_dir);
      kt::save_model((run_dir / "model.json").string(), run.model,
                     {{"learn_config", run.info}});
      json report = {{"format_version", 1},
                     {"run", run.info},
                     {"evaluation", eval}};
      kt::write_json_file((run_dir / "report.json").string(), report);

      json entry = run.info;
      entry["evaluation"] = eval;
      combined["runs"].push_back(entry);
      summary << "," << summary_metric;
      log << run_name << " pll_target=" << eval.at("pll_target_test")
          << " pll_translated=" << eval.at("pll_translated_source_test")
          << "\n";
    }
    summary << "\n";
  }
  kt::write_json_file((fs::path(a.out_dir) / "report.json").string(), combined);
  std::cout << "pipeline complete: " << a.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kt — probabilistic knowledge translation toolkit"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--seed", global.seed,
                 "Seed override applied to every subcommand");
  app.add_option("--config", global.config_path,
                 "Experiment config JSON (used by `pipeline`)");

  TranslateArgs targs;
  CLI::App* translate = app.add_subcommand(
      "translate", "Translate source knowledge to the target schema (K_S)");
  translate->add_option("--model", targs.model, "Source model JSON")->required();
  translate->add_option("--mapping", targs.mapping, "Mapping JSON")->required();
  translate->add_option("--out", targs.out, "Output model path")->required();
  translate->add_option("--method", targs.method, "ES-KS | LS-KS | TS-KS");
  translate->add_option("-n,--n-samples", targs.n_samples, "Sample budget N");
  translate->add_option("--theta", targs.theta, "Structure weight threshold");
  translate->add_option("--l2", targs.l2, "L2 prior for weight learning");
  translate->add_option("--seed", targs.seed, "Run seed");
  translate->add_option("--burn-in", targs.burn_in, "Gibbs burn-in sweeps");
  translate->add_option("--thin", targs.thin, "Gibbs thinning interval");
  translate->add_option("--cache-dir", targs.cache_dir,
                        "Sample cache (default $KT_CACHE_DIR)");

  LearnArgs largs;
  CLI::App* learn =
      app.add_subcommand("learn", "Learn a model from a dataset");
  learn->add_option("--data", largs.data, "Training CSV")->required();
  learn->add_option("--out", largs.out, "Output model path")->required();
  learn->add_option("--structure", largs.structure,
                    "dtsl | empty | model JSON with the feature skeleton");
  learn->add_option("--l2", largs.l2, "L2 prior");
  learn->add_option("--cv-grid", largs.cv_grid,
                    "Comma-separated l2 grid for 4-fold CV");
  learn->add_option("--kappa", largs.kappa, "DTSL leaf smoothing");
  learn->add_option("--prior", largs.prior, "DTSL split penalty");
  learn->add_option("--mincount", largs.mincount, "DTSL minimum node size");
  learn->add_option("--seed", largs.seed, "CV fold seed");

  SampleArgs sargs;
  CLI::App* sample = app.add_subcommand(
      "sample", "Gibbs-sample a model (with --mapping: K_S target samples)");
  sample->add_option("--model", sargs.model, "Model JSON")->required();
  sample->add_option("--mapping", sargs.mapping,
                     "Mapping JSON: sample the implied target distribution");
  sample->add_option("--out", sargs.out, "Output CSV")->required();
  sample->add_option("-n,--n-samples", sargs.n_samples, "Kept samples");
  sample->add_option("--seed", sargs.seed, "Chain seed");
  sample->add_option("--burn-in", sargs.burn_in, "Burn-in sweeps");
  sample->add_option("--thin", sargs.thin, "Thinning interval");
  sample->add_option("--cache-dir", sargs.cache_dir,
                     "Sample cache (default $KT_CACHE_DIR)");

  GroundArgs gargs;
  CLI::App* ground_cmd =
      app.add_subcommand("ground", "Ground an MLN to a propositional model");
  ground_cmd->add_option("--mln", gargs.mln, "MLN JSON")->required();
  ground_cmd->add_option("--out", gargs.out, "Output model path")->required();
  ground_cmd->add_option("--size", gargs.sizes,
                         "Domain size as type=N (repeatable)");
  ground_cmd->add_option("--from-dbs", gargs.from_dbs,
                         "Training database JSONs for the constants heuristic");
  ground_cmd->add_option("--scalar", gargs.scalar,
                         "Constants heuristic multiplier");

  EvalArgs eargs;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a model on held-out data");
  eval_cmd->add_option("--model", eargs.model, "Model JSON")->required();
  eval_cmd->add_option("--target-test", eargs.target_test,
                       "Held-out target CSV")->required();
  eval_cmd->add_option("--translated-test", eargs.translated_test,
                       "Held-out translated source CSV")->required();
  eval_cmd->add_option("--out", eargs.out, "Report JSON path");
  eval_cmd->add_option("--grounding", eargs.grounding,
                       "Ground model JSON (adds WPLL blocks)");

  SynthArgs syargs;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic task bundle");
  synth->add_option("--kind", syargs.kind, "nba | university")->required();
  synth->add_option("--out-dir", syargs.out_dir, "Bundle directory")->required();
  synth->add_option("--seed", syargs.seed, "Task seed");
  synth->add_option("--noise", syargs.noise, "Mapping noise");
  synth->add_flag("--no-mismatch", syargs.no_mismatch,
                  "Disable granularity mismatch (nba)");
  synth->add_option("--attributes", syargs.attributes, "Attribute count (nba)");
  synth->add_option("--bins", syargs.bins, "Bins per attribute (nba)");
  synth->add_option("--n-train", syargs.n_train, "Training instances (nba)");
  synth->add_option("--n-test", syargs.n_test, "Test instances (nba)");
  synth->add_option("--scalar", syargs.scalar,
                    "Constants heuristic multiplier (university)");
  synth->add_option("--train-dbs", syargs.train_dbs,
                    "Training databases (university)");
  synth->add_option("--test-dbs", syargs.test_dbs,
                    "Test databases (university)");

  PipelineArgs pargs;
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "Run the method-matrix experiment");
  pipeline->add_option("--config", pargs.config,
                       "Experiment config JSON (or global --config)");
  pipeline->add_option("--out-dir", pargs.out_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*translate) return cmd_translate(targs, global);
    if (*learn) return cmd_learn(largs, global);
    if (*sample) return cmd_sample(sargs, global);
    if (*ground_cmd) return cmd_ground(gargs);
    if (*eval_cmd) return cmd_eval(eargs);
    if (*synth) return cmd_synth(syargs, global);
    if (*pipeline) return cmd_pipeline(pargs, global);
  } catch (const kt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
