#include "kt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "kt/conditionals.hpp"
#include "kt/error.hpp"
#include "kt/io.hpp"
#include "kt/rng.hpp"
#include "kt/sampling.hpp"
#include "kt/translate.hpp"

namespace kt {
namespace {

constexpr std::uint64_t kStreamTranslate = 0x7452616e;
constexpr std::uint64_t kStreamFolds = 0x464f4c44;

const Dataset& require_data(const Dataset* d, const char* method,
                            const char* what) {
  if (!d)
    throw ContractError(std::string(method) + " requires " + what +
                        "; pass the missing input");
  return *d;
}

const Structure& require_structure(const MethodInputs& in,
                                   const std::string& method) {
  if (!in.manual_structure)
    throw ContractError(method + " requires a manual structure");
  return *in.manual_structure;
}

nlohmann::json learn_info(const LearnConfig& cfg) {
  return {{"l2_prior", cfg.l2_prior},
          {"max_iters", cfg.max_iters},
          {"gradient_tolerance", cfg.gradient_tolerance},
          {"dtsl", {{"kappa", cfg.dtsl.kappa},
                    {"prior", cfg.dtsl.prior},
                    {"mincount", cfg.dtsl.mincount}}}};
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "ES-KS") return Method::kEsKs;
  if (name == "LS-KS") return Method::kLsKs;
  if (name == "TS-KS") return Method::kTsKs;
  if (name == "LS-DS") return Method::kLsDs;
  if (name == "MS-DS") return Method::kMsDs;
  if (name == "LS-DT") return Method::kLsDt;
  if (name == "MS-DT") return Method::kMsDt;
  throw ContractError("unknown method '" + std::string(name) +
                      "' (expected ES-KS, LS-KS, TS-KS, LS-DS, MS-DS, LS-DT "
                      "or MS-DT)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kEsKs: return "ES-KS";
    case Method::kLsKs: return "LS-KS";
    case Method::kTsKs: return "TS-KS";
    case Method::kLsDs: return "LS-DS";
    case Method::kMsDs: return "MS-DS";
    case Method::kLsDt: return "LS-DT";
    case Method::kMsDt: return "MS-DT";
  }
  throw ContractError("bad Method value");
}

bool is_ks_method(Method m) {
  return m == Method::kEsKs || m == Method::kLsKs || m == Method::kTsKs;
}

std::string cache_dir_from_env() {
  const char* dir = std::getenv("KT_CACHE_DIR");
  return dir ? dir : "";
}

Dataset sample_ks_data(const LogLinearModel& source, const Mapping& m,
                       const RunOptions& opt) {
  if (opt.n_samples == 0)
    throw ContractError("sample_ks_data: n_samples must be positive");
  if (!(m.source_schema() == source.schema()))
    throw ContractError(
        "sample_ks_data: mapping source schema does not match the model");
  if (!mapping_ok(validate_mapping(m)))
    throw ContractError("sample_ks_data: mapping fails validation");

  std::string cache = opt.cache_dir.empty() ? cache_dir_from_env()
                                            : opt.cache_dir;
  std::string cache_path;
  if (!cache.empty()) {
    const std::string key = fnv1a_hex(
        model_hash(source) + mapping_hash(m) + "|" +
        std::to_string(opt.seed) + "|" + std::to_string(opt.n_samples) + "|" +
        std::to_string(opt.burn_in) + "|" + std::to_string(opt.thin));
    cache_path = (std::filesystem::path(cache) / ("ks-" + key + ".csv")).string();
    if (std::filesystem::exists(cache_path)) {
      try {
        Dataset cached = load_dataset(cache_path);
        if (cached.schema == m.target_schema() &&
            cached.instances.size() == opt.n_samples)
          return cached;
      } catch (const std::exception&) {
        // Unreadable entry: treat as a miss.
      }
      // Stale, corrupt, or colliding entry: fall through and regenerate.
    }
  }

  // Ancestral scheme: Gibbs over the source p(X), then one conditional
  // target draw per kept source sample. Exact in the mapping direction, so
  // deterministic correspondences need no clamping and cannot stall a chain.
  SamplerConfig sc;
  sc.n_samples = opt.n_samples;
  sc.burn_in = opt.burn_in;
  sc.thin = opt.thin;
  sc.seed = opt.seed;
  const Dataset source_draws = gibbs_sample(source, sc);

  Dataset out = translate_dataset(m, source_draws, opt.n_samples,
                                  derive_seed(opt.seed, 0x6b735f74));
  out.provenance["generator"] = "K_S-sampling";
  out.provenance["burn_in"] = opt.burn_in;
  out.provenance["thin"] = opt.thin;
  out.provenance["model_hash"] = model_hash(source);
  out.provenance["mapping_hash"] = mapping_hash(m);

  if (!cache_path.empty()) {
    try {
      std::filesystem::create_directories(cache);
      save_dataset(cache_path, out);
    } catch (const std::exception&) {
      // The cache is best-effort; a failed write must not fail the run.
    }
  }
  return out;
}

RunResult run_method(Method method, const MethodInputs& in,
                     const RunOptions& opt) {
  const std::string name = to_string(method);
  nlohmann::json info = {{"method", name},
                         {"seed", opt.seed},
                         {"n_samples", opt.n_samples},
                         {"learn", learn_info(opt.learn)}};

  Structure structure;
  Dataset train;
  if (is_ks_method(method)) {
    if (!in.source_model || !in.mapping)
      throw ContractError(name + " requires the source model and the mapping");
    train = sample_ks_data(*in.source_model, *in.mapping, opt);
    info["burn_in"] = opt.burn_in;
    info["thin"] = opt.thin;
    info["model_hash"] = model_hash(*in.source_model);
    info["mapping_hash"] = mapping_hash(*in.mapping);
    switch (method) {
      case Method::kEsKs:
        structure = empty_structure(in.mapping->target_schema());
        break;
      case Method::kLsKs:
        structure = learn_structure_dtsl(train, opt.learn.dtsl);
        break;
      default:
        structure = translate_structure(*in.source_model, *in.mapping, opt.theta);
        info["theta"] = opt.theta;
        break;
    }
  } else if (method == Method::kLsDs || method == Method::kMsDs) {
    const Dataset& src =
        require_data(in.source_data, name.c_str(), "source data (D_S)");
    if (!in.mapping)
      throw ContractError(name + " requires the mapping to translate D_S");
    train = translate_dataset(*in.mapping, src, opt.n_samples,
                              derive_seed(opt.seed, kStreamTranslate));
    structure = method == Method::kLsDs
                    ? learn_structure_dtsl(train, opt.learn.dtsl)
                    : require_structure(in, name);
  } else {
    train = require_data(in.target_train, name.c_str(), "target data (D_T)");
    structure = method == Method::kLsDt
                    ? learn_structure_dtsl(train, opt.learn.dtsl)
                    : require_structure(in, name);
  }

  info["n_features"] = structure.size();
  RunResult result{learn_weights(structure, train, opt.learn), std::move(info)};
  return result;
}

nlohmann::json evaluate(const LogLinearModel& model, const Dataset& target_test,
                        const Dataset& translated_source_test) {
  return {{"pll_target_test", pll(model, target_test)},
          {"pll_translated_source_test", pll(model, translated_source_test)},
          {"n_target_test", target_test.instances.size()},
          {"n_translated_source_test", translated_source_test.instances.size()}};
}

nlohmann::json evaluate_relational(const LogLinearModel& model,
                                   const Grounding& bookkeeping,
                                   const Dataset& target_test,
                                   const Dataset& translated_source_test) {
  nlohmann::json report = evaluate(model, target_test, translated_source_test);
  const Grounding eval{model, bookkeeping.atom_pred,
                       bookkeeping.pred_groundings};
  auto wpll_block = [&](const Dataset& data) {
    double total = 0.0;
    std::vector<double> per_pred(bookkeeping.pred_groundings.size(), 0.0);
    for (const Assignment& a : data.instances) {
      const WpllReport r = wpll(eval, a);
      total += r.total;
      for (std::size_t i = 0; i < per_pred.size(); ++i)
        per_pred[i] += r.per_predicate[i];
    }
    const double n = static_cast<double>(data.instances.size());
    nlohmann::json block = {{"total", total / n}};
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t i = 0; i < per_pred.size(); ++i)
      per["pred_" + std::to_string(i)] = per_pred[i] / n;
    block["per_predicate"] = per;
    return block;
  };
  report["wpll_target_test"] = wpll_block(target_test);
  report["wpll_translated_source_test"] = wpll_block(translated_source_test);
  return report;
}

double cross_validate_l2(const Structure& structure, const Dataset& data,
                         std::span<const double> l2_grid, std::uint64_t seed,
                         const LearnConfig& base, std::uint32_t folds) {
  if (l2_grid.empty()) throw ContractError("cross_validate_l2: empty grid");
  if (folds < 2) throw ContractError("cross_validate_l2: need >= 2 folds");
  const std::size_t n = data.instances.size();
  if (n < static_cast<std::size_t>(folds) * base.dtsl.mincount)
    throw ContractError("cross_validate_l2: need at least folds*mincount "
                        "instances");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, kStreamFolds));
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_int(static_cast<int>(i))]);

  double best_l2 = l2_grid.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (double l2 : l2_grid) {
    LearnConfig cfg = base;
    cfg.l2_prior = l2;
    double mean = 0.0;
    for (std::uint32_t f = 0; f < folds; ++f) {
      Dataset train, held;
      train.schema = held.schema = data.schema;
      for (std::size_t i = 0; i < n; ++i)
        (i % folds == f ? held : train).instances.push_back(
            data.instances[order[i]]);
      const LogLinearModel model = learn_weights(structure, train, cfg);
      mean += pll(model, held) / folds;
    }
    if (mean > best_score || (mean == best_score && l2 > best_l2)) {
      best_score = mean;
      best_l2 = l2;
    }
  }
  return best_l2;
}

}  // namespace kt
