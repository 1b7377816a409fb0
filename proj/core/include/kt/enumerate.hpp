#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kt/model.hpp"

namespace kt {

/// Exact oracles refuse to enumerate more assignments than this by default.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1ull << 20;

/// Mixed-radix view of all complete assignments of a schema. Variable 0 is
/// the most significant digit, the last variable ticks fastest.
class AssignmentSpace {
 public:
  explicit AssignmentSpace(const Schema& schema,
                           std::uint64_t cap = kDefaultEnumerationCap);

  std::uint64_t size() const { return size_; }

  Assignment first() const;
  /// Advances to the next assignment; false once the space is exhausted.
  bool next(Assignment& a) const;

  std::uint64_t index_of(const Assignment& a) const;
  Assignment at(std::uint64_t index) const;

 private:
  std::vector<std::uint32_t> radix_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t size_ = 1;
};

double log_sum_exp(std::span<const double> xs);

/// log Z = log sum_a exp(energy(a)), in log-space.
double exact_log_partition(const LogLinearModel& model,
                           std::uint64_t cap = kDefaultEnumerationCap);

/// Exact p(lit) by enumeration.
double exact_marginal(const LogLinearModel& model, Literal lit,
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Normalized probability table indexed by AssignmentSpace order.
std::vector<double> exact_distribution(const LogLinearModel& model,
                                       std::uint64_t cap = kDefaultEnumerationCap);

/// D_KL[p || q]; both models must share one schema.
double exact_kl(const LogLinearModel& p, const LogLinearModel& q,
                std::uint64_t cap = kDefaultEnumerationCap);

/// D_KL[p || q] where p is an explicit table in AssignmentSpace order over
/// q's schema.
double exact_kl(std::span<const double> p, const LogLinearModel& q,
                std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace kt
