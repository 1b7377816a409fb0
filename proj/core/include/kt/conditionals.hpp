#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kt/model.hpp"

namespace kt {

/// Per-variable index over a feature set: everything needed to evaluate
/// p(x_j | x_{-j}) from the features touching variable j only.
///
/// The indexed feature list must outlive this object.
class LocalConditionals {
 public:
  LocalConditionals(const Schema& schema, const std::vector<Feature>& features);

  std::size_t n_vars() const { return by_var_.size(); }
  std::uint32_t domain_size(std::uint32_t var) const { return radix_[var]; }
  std::uint32_t max_domain_size() const { return max_radix_; }

  /// Fills logits[v] = sum of weights of features that would be satisfied
  /// with x_var = v, holding the rest of `a` fixed. logits must have the
  /// variable's domain size.
  void local_logits(const Assignment& a, std::uint32_t var,
                    std::span<double> logits) const;

  /// log p(x_var = a[var] | rest) under the indexed features.
  double log_conditional(const Assignment& a, std::uint32_t var) const;

  /// Sum over variables of log p(x_j | x_{-j}) for one instance.
  double instance_pll(const Assignment& a) const;

  /// instance_pll that also accumulates its gradient with respect to the
  /// feature weights into `grad` (sized like the feature list).
  double instance_pll_grad(const Assignment& a, std::span<double> grad) const;

 private:
  struct Entry {
    std::uint32_t feature;    // index into the feature list
    std::uint32_t pinned;     // value this feature pins at the variable
  };

  bool rest_satisfied(const Feature& f, const Assignment& a,
                      std::uint32_t var) const;

  const std::vector<Feature>* features_;
  std::vector<std::vector<Entry>> by_var_;
  std::vector<std::uint32_t> radix_;
  std::uint32_t max_radix_ = 0;
};

/// Mean per-instance pseudo-log-likelihood of the data under the model.
/// Conditionals are computed from the features touching each variable only.
double pll(const LogLinearModel& model, const Dataset& data);

}  // namespace kt
