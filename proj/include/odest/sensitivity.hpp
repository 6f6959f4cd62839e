#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "odest/netgen_a.hpp"
#include "odest/netgen_b.hpp"
#include "odest/nuts.hpp"

namespace odest {

struct SweepGrid {
    std::vector<std::string> models = {"ib", "ad"};
    std::vector<double> bin_widths = {5, 15, 30, 60};  // minutes
    std::vector<double> etas = {0.0, 0.5, 1.0};
    std::vector<double> phis = {10, 100, 1000};
    std::size_t replicates = 1;
    std::size_t N = 100;
    std::size_t S = 15;
    double window_minutes = 120.0;      // departure window length
    double arrival_gap_minutes = 60.0;  // arrival window starts this much later
    SamplerConfig sampler;              // reduced settings for sweep fits
    std::uint64_t seed = 1;

    SweepGrid() {
        sampler.chains = 2;
        sampler.warmup = 500;
        sampler.samples = 500;
    }
};

struct SweepCell {
    std::string model;
    double bin_width = 0.0, eta = 0.0, phi = 0.0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    double mse = 0.0;
    double mean_hpd = 0.0;
    double runtime_seconds = 0.0;
    std::string error;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

/// Fits every grid cell on freshly generated network-B data (deterministic
/// per-cell seeds) and records accuracy/precision. Per-cell failures are
/// recorded and the sweep continues.
SweepResult run_sweep(const SweepGrid& grid, const TimetableGraph& graph);

struct MetamodelFit {
    std::string model;
    std::string response;
    std::size_t n_cells = 0;
    std::array<double, 4> beta{};          // intercept, w, eta, phi (MinMax-normalized)
    std::array<double, 4> p_values{};
    std::array<double, 3> correlations{};  // raw regressors vs response
    std::array<double, 3> sobol_first{};
    std::array<double, 3> sobol_total{};
    std::array<std::pair<double, double>, 3> sobol_first_ci{};
    std::array<std::pair<double, double>, 3> sobol_total_ci{};
};

/// OLS metamodel of a sweep response on MinMax-normalized (w, eta, phi) for
/// one model type, with two-sided t-test p-values and Pearson correlations.
MetamodelFit fit_metamodel(const SweepResult& sweep, const std::string& response,
                           const std::string& model);

struct SobolIndices {
    std::vector<double> first, total;
    std::vector<std::pair<double, double>> first_ci, total_ci;
};

/// Saltelli/Jansen Monte Carlo estimate of first-order and total Sobol
/// indices of f over independent U(0,1) inputs, with bootstrap CIs.
SobolIndices sobol_indices(const std::function<double(const std::vector<double>&)>& f,
                           std::size_t dim, std::size_t n_samples, std::size_t bootstrap,
                           std::uint64_t seed);

/// Indices of the fitted linear metamodel; fills the metamodel's sobol fields.
void attach_sobol(MetamodelFit& fit, std::size_t n_samples = 10000, std::size_t bootstrap = 1000,
                  std::uint64_t seed = 1);

struct RegStudyRow {
    std::size_t N = 0;
    double bayes_reg = 0.0, bayes_unreg = 0.0, qp_reg = 0.0, qp_unreg = 0.0;
};

/// Appendix-style regularization comparison: fit on nested prefixes of a
/// generated training pool, score Y = X A on held-out validation data.
std::vector<RegStudyRow> regularization_study(const GenAConfig& base,
                                              const std::vector<std::size_t>& n_list,
                                              std::size_t validation_n,
                                              const SamplerConfig& sampler);

struct PresetExperiment {
    std::string name;
    double bin_width_minutes = 0.0;
    double eta = 0.0;
    double phi = 0.0;
};

/// Named critical parameter combinations: "worst", "best_ib", "best_ad".
PresetExperiment preset_experiment(const std::string& name);
std::vector<PresetExperiment> all_presets();

}  // namespace odest
