#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "odest/rng.hpp"
#include "odest/types.hpp"

namespace odest {

/// Configuration of the instantaneous-balance test generator: known OD
/// matrix, Negative-Binomial entry counts, categorical destination choice.
struct GenAConfig {
    std::size_t S = 15;
    std::size_t N = 30;
    std::vector<double> mu_x;  // mean entry counts per station
    double phi = 10.0;         // Negative-Binomial dispersion
    std::uint64_t seed = 1;

    void validate() const;
};

/// The 15-station reference configuration.
GenAConfig default_gen_a_config();

/// Row-wise symmetric Dirichlet OD matrix: per-row concentration ~ U(0, 2).
/// Degenerate draws (all row mass collapsed onto one coordinate) are retried
/// up to 10 times.
ODMatrix sample_od_matrix_a(std::size_t S, std::uint64_t seed);

/// One Dirichlet draw by gamma normalization; small concentrations go
/// through log space so rows collapse only when coordinate ratios exceed
/// double range. Returns false on a degenerate draw (all mass on one
/// coordinate).
bool sample_dirichlet(const std::vector<double>& conc, RngEngine& rng, std::vector<double>& out);

/// Negative-Binomial draw with mean mu and dispersion phi through the
/// Gamma(phi, mu/phi)-mixed Poisson construction: variance mu + mu^2/phi.
long long sample_negbin(double mu, double phi, RngEngine& rng);

/// Splits `count` trials over categorical probabilities p (sequential
/// binomial thinning; distribution identical to per-trial draws).
std::vector<long long> multinomial_split(long long count, const std::vector<double>& p,
                                         RngEngine& rng);

/// Generates the OD matrix and N observations; per observation the entry and
/// exit totals balance exactly.
std::pair<ODMatrix, ObservationSet> generate_network_a(const GenAConfig& cfg);

/// Exit counts for given entries under a known OD matrix (used for
/// validation data in the regularization study).
ObservationSet generate_exits_for(const ODMatrix& truth, const GenAConfig& cfg,
                                  std::uint64_t stream);

}  // namespace odest
