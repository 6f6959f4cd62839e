#pragma once

#include <cstdint>
#include <vector>

#include "odest/types.hpp"

namespace odest {

/// Monotone rational-quadratic interpolant through a non-decreasing series
/// (Gregory-Delbourgo form) with monotone-limited three-point derivative
/// estimates. Interpolates the knots exactly and never undershoots.
class MonotoneRationalQuadratic {
  public:
    MonotoneRationalQuadratic(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;

  private:
    std::vector<double> x_, y_, d_;  // knots, values, derivative estimates
};

/// Up-samples cumulative counts to a finer grid and returns the per-interval
/// first differences. The target interval must divide every original
/// recording interval so that re-summing over an original interval recovers
/// its count exactly. Fails on non-monotone cumulative input, reporting the
/// offending index.
std::vector<double> upsample_counts(const std::vector<double>& timestamps,
                                    const std::vector<double>& cumulative_counts,
                                    double target_interval);

/// Rebalances entry/exit totals per observation by rule of proportion: the
/// side with the smaller total is scaled up; the other side is untouched.
ObservationSet balance_counts(const ObservationSet& obs);

struct ImputeResult {
    std::vector<double> series;
    std::vector<std::uint8_t> edited;  // 1 where a value was filled or replaced
};

/// Fills missing values (NaN) with the rolling median of valid neighbours
/// within +-window_radius (widened when empty) and replaces values whose
/// robust z-score (median absolute deviation) exceeds outlier_z the same way.
ImputeResult impute_gaps(const std::vector<double>& series, std::size_t window_radius,
                         double outlier_z);

}  // namespace odest
