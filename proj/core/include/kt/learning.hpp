#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kt/model.hpp"

namespace kt {

/// Feature skeleton: literal sets whose weights are to be learned. Weights
/// carried by the features are ignored.
struct Structure {
  std::vector<Feature> features;

  std::size_t size() const { return features.size(); }
};

struct DtslParams {
  double kappa = 1.0;      // leaf smoothing pseudocount
  double prior = 2.0;      // split penalty per added free parameter
  std::uint32_t mincount = 16;  // nodes smaller than this are not split
};

struct LearnConfig {
  double l2_prior = 1.0;          // Gaussian precision on weights
  std::uint32_t max_iters = 500;
  double gradient_tolerance = 1e-5;
  DtslParams dtsl;
};

/// Mean per-instance PLL of the data under (structure, weights), minus the
/// penalty (l2/2) * ||w||^2.
double pll_objective(const Structure& structure, std::span<const double> weights,
                     const Dataset& data, double l2);

/// Exact analytic gradient of pll_objective with respect to the weights.
std::vector<double> pll_gradient(const Structure& structure,
                                 std::span<const double> weights,
                                 const Dataset& data, double l2);

/// Maximizes pll_objective over the weights (concave, so the stationary
/// point is the global optimum). Deterministic L-BFGS from a zero start;
/// converged when the gradient's max-norm drops below cfg.gradient_tolerance.
/// Throws ConvergenceError carrying the best iterate when max_iters runs out.
LogLinearModel learn_weights(const Structure& structure, const Dataset& data,
                             const LearnConfig& cfg);

/// Decision-tree structure learning: per variable, greedily grows a
/// probability-estimation tree predicting it from the other variables
/// (multiway splits, penalized log-likelihood gain, kappa-smoothed leaves,
/// nodes below mincount never split), then converts every root-to-leaf path
/// crossed with every predicted value into a conjunctive feature. The union
/// over variables is deduplicated.
Structure learn_structure_dtsl(const Dataset& data, const DtslParams& params);

/// Marginal-only skeleton: one singleton feature per (variable, value) pair,
/// skipping the first domain value of each variable as the reference.
Structure empty_structure(const Schema& schema);

}  // namespace kt
