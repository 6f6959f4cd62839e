#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odest/layout.hpp"
#include "odest/types.hpp"

namespace odest {

/// Instantaneous-balance Bayesian model. Entry counts X are model constants,
/// exit counts Y are the evidence; each exit count is a lower-zero-truncated
/// normal around the OD-weighted entries plus a per-station intercept. The
/// regularized variant adds the minimal-bias intercept penalty and the
/// expected-value likelihood on the count means.
struct IBModel {
    ObservationSet obs;
    std::vector<double> xbar, ybar;  // per-station sample means
    double dirichlet_c = 1.0;
    std::optional<std::vector<std::uint8_t>> structural_zeros;
    bool regularized = true;
    OdParamLayout layout;  // intercepts present
};

IBModel make_ib_model(ObservationSet obs, bool regularized = true, double dirichlet_c = 1.0,
                      std::optional<std::vector<std::uint8_t>> structural_zeros = std::nullopt);

/// Location vector mu_j = sum_{i != j} alpha_ij x_i + r_j.
std::vector<double> ib_mu(const Mat& alpha, const double* x_row, const std::vector<double>& r);

/// Log posterior over the unconstrained parameterization (stick-broken rows,
/// log scales, raw intercepts), transform Jacobians included.
double ib_log_posterior(const IBModel& model, const std::vector<double>& u);

/// Value and analytic gradient; the per-destination likelihood terms are
/// reduced in parallel. grad is resized and overwritten.
double ib_log_posterior_grad(const IBModel& model, const std::vector<double>& u,
                             std::vector<double>& grad);

// Serial reference implementations with naive loops and their own density
// formulas; kept for testing the parallel kernels and for the benchmark.
double ib_log_posterior_serial(const IBModel& model, const std::vector<double>& u);
double ib_log_posterior_grad_serial(const IBModel& model, const std::vector<double>& u,
                                    std::vector<double>& grad);

/// One predictive exit-count sample per retained draw at the given entry row.
Mat ib_posterior_predictive(const IBModel& model, const PosteriorDraws& draws,
                            const std::vector<double>& x_row, std::uint64_t seed);

/// Uncorrected predictor xbar^T A (no intercepts).
std::vector<double> ib_predict_uncorrected(const Mat& a_mean, const std::vector<double>& xbar);

}  // namespace odest
