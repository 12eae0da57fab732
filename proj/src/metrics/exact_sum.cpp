#include <cmath>

#include "stguide/metrics.hpp"

namespace stguide {

// Shewchuk-style non-overlapping partials with a correctly rounded final sum.
void ExactSum::add(double x) {
  ++count_;
  if (!std::isfinite(x)) {
    nonfinite_ = has_nonfinite_ ? nonfinite_ + x : x;
    has_nonfinite_ = true;
    return;
  }
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
  const std::size_t count = count_ + other.count_;
  for (double p : other.partials_) add(p);
  if (other.has_nonfinite_) add(other.nonfinite_);
  count_ = count;
}

double ExactSum::value() const {
  if (has_nonfinite_) return nonfinite_;
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round half to even across the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double exact_sum(std::span<const double> values) {
  ExactSum s;
  for (double v : values) s.add(v);
  return s.value();
}

double exact_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySet, "mean of an empty set");
  return exact_sum(values) / static_cast<double>(values.size());
}

}  // namespace stguide
