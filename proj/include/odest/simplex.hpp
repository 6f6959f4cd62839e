#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace odest {

/// Stick-breaking bijection between R^(K-1) and the interior of the
/// (K-1)-simplex. The logit shift log(K-k) centres the map so that y = 0
/// lands on the uniform simplex point.
///
/// Workspace from a forward pass, reused by the gradient backprop.
struct StickBreakWork {
    std::vector<double> z;      // K-1 break fractions
    std::vector<double> zc;     // complements 1-z computed stably
    std::vector<double> stick;  // K remaining-mass values, stick[0] = 1
};

/// Maps y (length K-1) to an interior simplex point x (length K) and returns
/// the log |det J| of the forward map. Pass a workspace to enable backprop.
double simplex_forward(const double* y, std::size_t K, double* x, StickBreakWork* work = nullptr);

std::vector<double> simplex_forward(const std::vector<double>& y);

/// Exact algebraic inverse; returns (y, log-Jacobian of the forward map at y).
/// Throws if x is not strictly interior.
std::pair<std::vector<double>, double> simplex_inverse(const std::vector<double>& x);

/// Accumulates into grad_y the pullback of grad_x through the forward map,
/// plus (when with_logjac) the gradient of the forward log-Jacobian itself.
void simplex_backprop(const StickBreakWork& work, const double* grad_x, std::size_t K,
                      double* grad_y, bool with_logjac);

}  // namespace odest
