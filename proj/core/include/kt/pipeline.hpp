#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kt/learning.hpp"
#include "kt/mapping.hpp"
#include "kt/model.hpp"
#include "kt/relational.hpp"

namespace kt {

/// The §5.1 method matrix. K_S methods use only the source model and the
/// mapping; D_S methods use translated source data; D_T methods use target
/// data.
enum class Method { kEsKs, kLsKs, kTsKs, kLsDs, kMsDs, kLsDt, kMsDt };

Method parse_method(std::string_view name);  // "ES-KS", "LS-KS", ...
std::string to_string(Method m);
bool is_ks_method(Method m);

struct MethodInputs {
  const LogLinearModel* source_model = nullptr;  // K_S methods
  const Mapping* mapping = nullptr;              // K_S and D_S methods
  const Dataset* source_data = nullptr;          // D_S methods
  const Dataset* target_train = nullptr;         // D_T methods
  const Structure* manual_structure = nullptr;   // MS methods
};

struct RunOptions {
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 0;
  double theta = 0.1;  // structure-translation weight threshold
  LearnConfig learn;
  std::uint64_t burn_in = 1000;
  std::uint64_t thin = 10;
  /// Sample cache directory; empty falls back to $KT_CACHE_DIR, and when
  /// that is unset too, caching is off.
  std::string cache_dir;
};

struct RunResult {
  LogLinearModel model;
  nlohmann::json info;
};

/// Runs one method. Throws ContractError when a required input is missing;
/// never touches inputs the method does not use.
RunResult run_method(Method method, const MethodInputs& in,
                     const RunOptions& opt);

/// Samples the implied target distribution: Gibbs over the source p(X),
/// then one conditional target draw per kept sample. Cached on disk when a
/// cache directory is configured.
Dataset sample_ks_data(const LogLinearModel& source, const Mapping& m,
                       const RunOptions& opt);

/// PLL of the model on both held-out sets, with sample counts.
nlohmann::json evaluate(const LogLinearModel& model, const Dataset& target_test,
                        const Dataset& translated_source_test);

/// Same plus WPLL blocks (total and per predicate) computed with the
/// grounding's bookkeeping.
nlohmann::json evaluate_relational(const LogLinearModel& model,
                                   const Grounding& bookkeeping,
                                   const Dataset& target_test,
                                   const Dataset& translated_source_test);

/// 4-fold cross-validation of the l2 prior for a fixed structure: returns
/// the grid point with the best mean held-out PLL, ties toward larger l2.
/// Fold assignment is a seeded permutation.
double cross_validate_l2(const Structure& structure, const Dataset& data,
                         std::span<const double> l2_grid, std::uint64_t seed,
                         const LearnConfig& base, std::uint32_t folds = 4);

/// $KT_CACHE_DIR or empty.
std::string cache_dir_from_env();

}  // namespace kt
