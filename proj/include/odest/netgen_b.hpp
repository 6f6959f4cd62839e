#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "odest/rng.hpp"
#include "odest/types.hpp"

namespace odest {

struct IngarchParams {
    double nu0 = 1.0;   // intercept
    double nu1 = 0.1;   // weights on lagged observations
    double nu2 = 0.05;
    double xi1 = 0.1;   // weights on lagged conditional means
    double xi2 = 0.05;
};

/// Seasonal ARIMA(1,1,1)(1,1,1)_T recursion coefficients for the trend.
struct TrendParams {
    double ar = 0.8;
    double ma = 0.9;
    double seasonal_ar = 0.5;
    double seasonal_ma = -0.5;
};

struct GenBConfig {
    std::size_t S = 15;
    std::size_t N = 100;
    std::size_t T = 24;               // departure bins
    double bin_width_minutes = 5.0;
    int t0 = 1;                       // global bin index where departures start
    int t1 = 13;                      // global bin index where arrivals start
    double phi = 10.0;
    double eta = 0.5;                 // trend scale
    IngarchParams ingarch;
    TrendParams trend;
    std::array<double, 4> zeta = {-0.002, -0.006, -0.002, -1.0};  // MNL coefficients
    double arrival_margin_minutes = 10.0;
    std::uint64_t seed = 1;

    void validate() const;
    int window_gap_bins() const { return t1 - t0; }
};

struct TransitLine {
    std::string name;
    std::vector<std::size_t> stops;  // station indices, in order
    std::vector<double> run_times;   // minutes per segment, size stops-1
    double headway_minutes = 0.0;
};

struct Footpath {
    std::size_t a = 0, b = 0;
    double walk_minutes = 0.0;
};

/// Frequency-based synthetic timetable. Lines run in both directions with
/// the listed per-segment run times; expected boarding wait is headway/2.
struct TimetableGraph {
    std::vector<std::string> stations;
    std::vector<TransitLine> lines;
    std::vector<Footpath> transfers;
    std::vector<std::size_t> access;  // indices of the S OD stations

    void validate() const;  // checks shapes and strong connectivity
};

TimetableGraph load_timetable_json(const std::filesystem::path& path);
void write_timetable_json(const std::filesystem::path& path, const TimetableGraph& g);

struct PathAlternative {
    double in_vehicle_minutes = 0.0;   // z1
    double wait_minutes = 0.0;         // z2
    double transfer_minutes = 0.0;     // z3
    int transfers = 0;                 // z4
    double total_minutes = 0.0;

    std::array<double, 4> attributes() const {
        return {in_vehicle_minutes, wait_minutes, transfer_minutes,
                static_cast<double>(transfers)};
    }
};

/// Earliest-arrival travel time in minutes between two graph nodes.
double earliest_arrival_minutes(const TimetableGraph& g, std::size_t origin,
                                std::size_t destination);

/// The earliest-arrival path plus every simple alternative arriving within
/// the margin of it, sorted by total time. departure_time_minutes only
/// offsets clock arithmetic; the synthetic timetable is frequency-based.
std::vector<PathAlternative> enumerate_paths(const TimetableGraph& g, std::size_t origin,
                                             std::size_t destination,
                                             double departure_time_minutes,
                                             double arrival_margin_minutes);

/// Softmax choice probabilities over path utilities zeta' z, computed with a
/// log-sum-exp shift.
std::vector<double> mnl_choice_probs(const std::vector<PathAlternative>& alts,
                                     const std::array<double, 4>& zeta);

/// Expected whole-bin delays between the access stations: the alternatives'
/// mean total time, rounded half-up to bins with a minimum of one bin.
TravelTimeTable expected_delay_table(const TimetableGraph& g, double departure_time_minutes,
                                     double arrival_margin_minutes, double bin_width_minutes);

/// Structural-zero mask over access-station pairs joined by a direct footpath.
std::vector<std::uint8_t> transfer_structural_zeros(const TimetableGraph& g);

/// Destination-attractiveness Dirichlet OD matrix: one concentration per
/// station drawn U(0,1); masked pairs forced to zero with row renormalization.
ODMatrix sample_od_matrix_b(std::size_t S, std::uint64_t seed,
                            const std::vector<std::uint8_t>& structural_zeros = {});

/// Non-negative trend series: the seasonal recursion shifted by its minimum,
/// blended with its mean by eta. mean(F) is independent of eta.
std::vector<double> generate_trend(std::size_t T, double eta, const TrendParams& params,
                                   std::uint64_t seed);

/// INGARCH count series driven by the trend; simulates T+1 bins and drops
/// the first.
std::vector<double> simulate_ingarch(std::size_t T, const std::vector<double>& trend,
                                     double phi, double eta, const IngarchParams& params,
                                     std::uint64_t seed);

/// Full generative process for the binned data set: trend + INGARCH entries,
/// categorical destinations, MNL path choice, delayed exits with window
/// truncation.
BinnedObservationSet generate_network_b(const GenBConfig& cfg, const TimetableGraph& g,
                                        const ODMatrix& truth);

}  // namespace odest
