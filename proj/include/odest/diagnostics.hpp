#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "odest/types.hpp"

namespace odest {

/// Mean squared error over all S^2 cells (the zero diagonal included).
double mse_vs_truth(const Mat& estimates, const ODMatrix& truth);

/// Narrowest contiguous interval containing ceil(prob * n) sorted samples.
std::pair<double, double> hpd_interval(std::vector<double> samples, double prob = 0.95);

/// Split-chain potential scale reduction. Constant chains return 1 by
/// convention.
double r_hat(const std::vector<std::vector<double>>& chains);

/// Multi-chain effective sample size from FFT autocovariances with Geyer
/// initial-monotone-positive-pair truncation.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

/// Per-cell posterior mean of the OD coefficients in a draws set.
Mat posterior_mean_matrix(const PosteriorDraws& draws, std::size_t S);

/// Mean 95% HPD width across all S^2 coefficient cells (diagonal width 0).
double mean_hpd(const PosteriorDraws& draws, std::size_t S, double prob = 0.95);

/// Per-observation destination flows X * A_mean; row totals are preserved.
Mat absolute_od_flow(const Mat& a_mean, const Mat& x_window);

/// Aggregated S x S OD demand: flow(i,j) = total entries at i times alpha_ij.
Mat od_demand_matrix(const Mat& a_mean, const std::vector<double>& x_totals);

/// Extracts one parameter across chains as chain-major series.
std::vector<std::vector<double>> parameter_chains(const PosteriorDraws& draws, std::size_t p);

struct DiagnosticsReport {
    int schema_version = 1;
    std::size_t S = 0;
    std::size_t chains = 0;
    std::size_t draws_per_chain = 0;
    std::size_t divergences = 0;
    std::size_t tree_depth_saturations = 0;
    std::optional<double> mse_mcmc;
    std::optional<double> mse_qp;
    double mean_hpd_95 = 0.0;
    std::optional<double> r_hat_max;   // absent for single-chain runs
    std::optional<double> ess_ratio_min;
    std::vector<std::string> param_names;       // OD coefficients only
    std::vector<double> r_hat_per_param;        // empty for single-chain runs
    std::vector<double> ess_ratio_per_param;
    std::vector<double> predictive_rel_error;   // per station, uncorrected predictor
    double sparsity_below_1e9 = 0.0;            // fraction of mean coefficients < 1e-9
    std::vector<double> row_max_coefficient;    // per-origin max of the posterior mean
};

/// Full diagnostics over a draws set; truth and the QP estimate are optional.
/// xbar/ybar enable the predictive relative-error check, which uses every
/// predictive_thin-th draw (0 = one-in-ceil(total/1000)); posterior means,
/// HPD widths, R-hat and ESS always use the full chains.
DiagnosticsReport diagnose(const PosteriorDraws& draws, std::size_t S,
                           const std::optional<ODMatrix>& truth,
                           const std::optional<Mat>& qp_estimate,
                           const std::vector<double>& xbar = {},
                           const std::vector<double>& ybar = {},
                           std::size_t predictive_thin = 0, int max_tree_depth = 10);

}  // namespace odest
