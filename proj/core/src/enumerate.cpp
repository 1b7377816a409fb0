#include "kt/enumerate.hpp"

#include <algorithm>
#include <cmath>

#include "kt/error.hpp"

namespace kt {

AssignmentSpace::AssignmentSpace(const Schema& schema, std::uint64_t cap) {
  radix_.reserve(schema.size());
  for (const Variable& v : schema.variables())
    radix_.push_back(static_cast<std::uint32_t>(v.domain.size()));
  for (std::uint32_t r : radix_) {
    if (size_ > cap / r)
      throw OracleTooLargeError("oracle too large: assignment space exceeds cap");
    size_ *= r;
  }
  stride_.assign(radix_.size(), 1);
  for (std::size_t i = radix_.size(); i-- > 1;)
    stride_[i - 1] = stride_[i] * radix_[i];
}

Assignment AssignmentSpace::first() const {
  return Assignment(radix_.size(), 0);
}

bool AssignmentSpace::next(Assignment& a) const {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (++a[i] < static_cast<std::int32_t>(radix_[i])) return true;
    a[i] = 0;
  }
  return false;
}

std::uint64_t AssignmentSpace::index_of(const Assignment& a) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    idx += static_cast<std::uint64_t>(a[i]) * stride_[i];
  return idx;
}

Assignment AssignmentSpace::at(std::uint64_t index) const {
  Assignment a(radix_.size());
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    a[i] = static_cast<std::int32_t>(index / stride_[i]);
    index %= stride_[i];
  }
  return a;
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -INFINITY;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

namespace {

/// Online log-sum-exp over a stream of energies.
class RunningLse {
 public:
  void add(double x) {
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -INFINITY;
  double sum_ = 0.0;
};

}  // namespace

double exact_log_partition(const LogLinearModel& model, std::uint64_t cap) {
  AssignmentSpace space(model.schema(), cap);
  RunningLse lse;
  Assignment a = space.first();
  do {
    lse.add(energy(model, a));
  } while (space.next(a));
  return lse.value();
}

double exact_marginal(const LogLinearModel& model, Literal lit, std::uint64_t cap) {
  if (lit.var >= model.schema().size() ||
      lit.value >= model.schema().var(lit.var).domain.size())
    throw ContractError("exact_marginal: literal outside schema");
  AssignmentSpace space(model.schema(), cap);
  RunningLse all, hit;
  bool any_hit = false;
  Assignment a = space.first();
  do {
    const double e = energy(model, a);
    all.add(e);
    if (a[lit.var] == static_cast<std::int32_t>(lit.value)) {
      hit.add(e);
      any_hit = true;
    }
  } while (space.next(a));
  if (!any_hit) return 0.0;
  return std::exp(hit.value() - all.value());
}

std::vector<double> exact_distribution(const LogLinearModel& model,
                                       std::uint64_t cap) {
  AssignmentSpace space(model.schema(), cap);
  std::vector<double> table(space.size());
  Assignment a = space.first();
  std::uint64_t i = 0;
  do {
    table[i++] = energy(model, a);
  } while (space.next(a));
  const double log_z = log_sum_exp(table);
  for (double& t : table) t = std::exp(t - log_z);
  return table;
}

double exact_kl(const LogLinearModel& p, const LogLinearModel& q,
                std::uint64_t cap) {
  if (!(p.schema() == q.schema()))
    throw ContractError("exact_kl: models have different schemas");
  AssignmentSpace space(p.schema(), cap);
  std::vector<double> ep(space.size()), eq(space.size());
  Assignment a = space.first();
  std::uint64_t i = 0;
  do {
    ep[i] = energy(p, a);
    eq[i] = energy(q, a);
    ++i;
  } while (space.next(a));
  const double log_zp = log_sum_exp(ep);
  const double log_zq = log_sum_exp(eq);
  double kl = 0.0;
  for (std::uint64_t k = 0; k < space.size(); ++k) {
    const double log_pk = ep[k] - log_zp;
    const double log_qk = eq[k] - log_zq;
    kl += std::exp(log_pk) * (log_pk - log_qk);
  }
  return std::max(kl, 0.0);
}

double exact_kl(std::span<const double> p, const LogLinearModel& q,
                std::uint64_t cap) {
  AssignmentSpace space(q.schema(), cap);
  if (p.size() != space.size())
    throw ContractError("exact_kl: table size does not match q's schema");
  std::vector<double> eq(space.size());
  Assignment a = space.first();
  std::uint64_t i = 0;
  do {
    eq[i++] = energy(q, a);
  } while (space.next(a));
  const double log_zq = log_sum_exp(eq);
  double kl = 0.0;
  for (std::uint64_t k = 0; k < space.size(); ++k) {
    if (p[k] <= 0.0) continue;
    kl += p[k] * (std::log(p[k]) - (eq[k] - log_zq));
  }
  return std::max(kl, 0.0);
}

}  // namespace kt
