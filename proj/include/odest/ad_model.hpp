#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odest/layout.hpp"
#include "odest/types.hpp"

namespace odest {

/// Average-delay Bayesian model. Exit counts per (destination, observation,
/// arrival bin) are truncated normals around the delay-lagged entry counts
/// collected in the per-destination assignment matrices H_j. No intercepts.
struct ADModel {
    BinnedObservationSet binned;
    TravelTimeTable delays;
    std::vector<Mat> H;  // per destination j: (N*T_a) x S lagged entries
    double dirichlet_c = 1.0;
    std::optional<std::vector<std::uint8_t>> structural_zeros;
    OdParamLayout layout;  // no intercepts

    std::size_t rows_per_destination() const { return binned.N * binned.T_a; }
};

/// 1-based global assignment row index k for (destination j, observation n,
/// arrival bin t_a), all 1-based.
std::size_t assignment_row_index(std::size_t j, std::size_t n, std::size_t t_a, std::size_t N,
                                 std::size_t T_a);

/// Builds the per-destination assignment matrices. Fails if any used delay
/// exceeds the departure/arrival window gap.
ADModel build_assignment(BinnedObservationSet binned, TravelTimeTable delays,
                         double dirichlet_c = 1.0,
                         std::optional<std::vector<std::uint8_t>> structural_zeros = std::nullopt);

double ad_log_posterior(const ADModel& model, const std::vector<double>& u);
double ad_log_posterior_grad(const ADModel& model, const std::vector<double>& u,
                             std::vector<double>& grad);

// Serial reference implementations (naive triple loop, own density formulas).
double ad_log_posterior_serial(const ADModel& model, const std::vector<double>& u);
double ad_log_posterior_grad_serial(const ADModel& model, const std::vector<double>& u,
                                    std::vector<double>& grad);

}  // namespace odest
