#pragma once

#include <vector>

#include "odest/layout.hpp"
#include "odest/simplex.hpp"

namespace odest {

/// A decoded unconstrained point with the per-row stick-breaking workspaces
/// needed for gradient backpropagation.
struct OdDecoded {
    Mat alpha;
    std::vector<double> sigma;
    std::vector<double> r;
    std::vector<StickBreakWork> work;  // one per OD row
    double log_jac_rows = 0.0;         // sum of row transform log-Jacobians
};

void decode_od_point(const OdParamLayout& layout, const double* u, OdDecoded& out);

/// Log prior of the per-row symmetric Dirichlet (normalizer omitted):
/// sum over free cells of (c-1) * log alpha. Zero when c == 1.
double dirichlet_log_prior(const OdParamLayout& layout, const OdDecoded& d, double c);

/// Transform contribution to the unconstrained-space log density: row
/// stick-breaking Jacobians plus log sigma per scale (flat prior on sigma).
double od_transform_log_jacobian(const OdParamLayout& layout, const OdDecoded& d);

/// Pulls gradients w.r.t. (alpha, sigma, r) back to the unconstrained vector,
/// adding the Dirichlet prior and all transform-Jacobian gradient terms.
/// grad_alpha_t holds d/d alpha(i,j) at (j,i) so that the per-destination
/// kernels accumulate into contiguous rows; free cells only are read.
/// grad_u must be zero-initialized.
void od_chain_rule(const OdParamLayout& layout, const OdDecoded& d, double dirichlet_c,
                   const Mat& grad_alpha_t, const std::vector<double>& grad_sigma,
                   const std::vector<double>& grad_r, double* grad_u);

}  // namespace odest
