#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odest/mat.hpp"

namespace odest {

// Tolerances for the row-simplex constraint. Rows must sum to one within
// kSimplexTolConstruct when a matrix is built or loaded; MCMC draws that went
// through a transform round-trip are allowed the looser kSimplexTolDraws.
inline constexpr double kSimplexTolConstruct = 1e-12;
inline constexpr double kSimplexTolDraws = 1e-10;

/// Row-simplex matrix of OD split coefficients with a zero diagonal.
/// alpha(i,j) is the proportion of entries at i bound for j.
struct ODMatrix {
    std::size_t S = 0;
    Mat alpha;                                    // S x S, rows sum to 1, diag 0
    std::optional<std::vector<std::uint8_t>> structural_zeros;  // S*S row-major mask

    bool zero_at(std::size_t i, std::size_t j) const {
        return structural_zeros && (*structural_zeros)[i * S + j] != 0;
    }
};

struct OdViolation {
    std::size_t row = 0;
    std::string constraint;  // "diagonal", "non-negative", "structural-zero", "sum-to-one"
    double residual = 0.0;
};

/// Checks the ODMatrix invariants row by row and reports the first violation,
/// or nullopt if the matrix is valid.
std::optional<OdViolation> validate_od_matrix(const ODMatrix& m,
                                              double sum_tol = kSimplexTolConstruct);

/// Entry/exit counts aggregated per observation window (instantaneous-balance
/// input). Counts are stored as reals: up-sampling produces fractional counts.
struct ObservationSet {
    std::size_t S = 0;
    std::size_t N = 0;
    Mat X;  // N x S entries
    Mat Y;  // N x S exits
    std::vector<std::string> station_labels;
};

/// Time-binned entry/exit counts (average-delay input). Departure bins are
/// indexed 1..T and arrival bins 1..T_a internally; t0 and t1 are the global
/// 1-based bin indices at which the departure and arrival windows start, so
/// T_a = T - (t1 - t0).
struct BinnedObservationSet {
    std::size_t S = 0;
    std::size_t N = 0;
    std::size_t T = 0;    // departure bins
    std::size_t T_a = 0;  // arrival bins
    double bin_width_minutes = 0.0;
    int t0 = 1;
    int t1 = 1;
    std::vector<Mat> Xb;  // N matrices of T x S
    std::vector<Mat> Yb;  // N matrices of T_a x S
    std::vector<std::string> station_labels;

    int window_gap_bins() const { return t1 - t0; }
};

void validate_observation_set(const ObservationSet& obs);
void validate_binned_observation_set(const BinnedObservationSet& b);

/// Expected travel delays between station pairs in whole time bins.
struct TravelTimeTable {
    std::size_t S = 0;
    std::vector<int> delays;  // S*S row-major, diagonal unused

    int at(std::size_t i, std::size_t j) const { return delays[i * S + j]; }
    int& at(std::size_t i, std::size_t j) { return delays[i * S + j]; }
};

/// Per-chain MCMC output in constrained space, plus sampler bookkeeping.
struct PosteriorDraws {
    std::size_t chains = 0;
    std::size_t draws_per_chain = 0;
    std::vector<std::string> param_names;       // length P
    std::vector<Mat> values;                    // per chain: D x P
    std::vector<std::vector<std::uint8_t>> divergent;  // per chain, length D
    std::vector<std::vector<int>> tree_depth;          // per chain, length D
    std::vector<double> step_size;                     // adapted, per chain

    std::size_t P() const { return param_names.size(); }
    std::size_t total_draws() const { return chains * draws_per_chain; }
    std::size_t divergence_count() const {
        std::size_t n = 0;
        for (const auto& c : divergent)
            for (auto f : c) n += f;
        return n;
    }
    /// Index of a named parameter, or npos.
    std::size_t param_index(const std::string& name) const;
};

/// Sums the time bins of a binned set into one entry/exit pair per
/// observation; total mass is preserved exactly.
ObservationSet aggregate_bins(const BinnedObservationSet& b);

}  // namespace odest
