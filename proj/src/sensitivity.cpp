#include "odest/sensitivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "odest/diagnostics.hpp"
#include "odest/fit.hpp"
#include "odest/preprocess.hpp"
#include "odest/qp.hpp"
#include "odest/stats.hpp"

namespace odest {

namespace {

GenBConfig cell_config(const SweepGrid& grid, const SweepCell& cell) {
    GenBConfig cfg;
    cfg.S = grid.S;
    cfg.N = grid.N;
    const double t_bins = grid.window_minutes / cell.bin_width;
    const double gap_bins = grid.arrival_gap_minutes / cell.bin_width;
    if (std::abs(t_bins - std::round(t_bins)) > 1e-9 ||
        std::abs(gap_bins - std::round(gap_bins)) > 1e-9)
        throw std::invalid_argument("sweep: bin width must divide the window lengths");
    cfg.T = static_cast<std::size_t>(std::round(t_bins));
    cfg.bin_width_minutes = cell.bin_width;
    cfg.t0 = 1;
    cfg.t1 = 1 + static_cast<int>(std::round(gap_bins));
    cfg.phi = cell.phi;
    cfg.eta = cell.eta;
    cfg.seed = cell.seed;
    return cfg;
}

void run_cell(const SweepGrid& grid, const TimetableGraph& graph, SweepCell& cell) {
    const auto t_start = std::chrono::steady_clock::now();
    const GenBConfig cfg = cell_config(grid, cell);
    const auto zeros = transfer_structural_zeros(graph);
    const ODMatrix truth = sample_od_matrix_b(cfg.S, derive_seed(cell.seed, 1), zeros);
    const BinnedObservationSet binned = generate_network_b(cfg, graph, truth);

    SamplerConfig sampler = grid.sampler;
    sampler.seed = derive_seed(cell.seed, 2);

    PosteriorDraws draws;
    if (cell.model == "ad") {
        const auto delays =
            expected_delay_table(graph, 8.0 * 60.0, cfg.arrival_margin_minutes,
                                 cfg.bin_width_minutes);
        const ADModel model = build_assignment(binned, delays, 1.0, zeros);
        draws = fit_ad(model, sampler);
    } else if (cell.model == "ib") {
        const ObservationSet balanced = balance_counts(aggregate_bins(binned));
        const IBModel model = make_ib_model(balanced, /*regularized=*/true, 1.0, zeros);
        draws = fit_ib(model, sampler);
    } else {
        throw std::invalid_argument("sweep: unknown model '" + cell.model + "'");
    }
    cell.mse = mse_vs_truth(posterior_mean_matrix(draws, cfg.S), truth);
    cell.mean_hpd = mean_hpd(draws, cfg.S);
    cell.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    cell.ok = true;
}

}  // namespace

SweepResult run_sweep(const SweepGrid& grid, const TimetableGraph& graph) {
    SweepResult result;
    std::size_t index = 0;
    for (const auto& model : grid.models)
        for (double w : grid.bin_widths)
            for (double eta : grid.etas)
                for (double phi : grid.phis)
                    for (std::size_t rep = 0; rep < grid.replicates; ++rep) {
                        SweepCell cell;
                        cell.model = model;
                        cell.bin_width = w;
                        cell.eta = eta;
                        cell.phi = phi;
                        cell.replicate = rep;
                        cell.seed = derive_seed(grid.seed, index++, rep + 1);
                        result.cells.push_back(std::move(cell));
                    }
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        try {
            run_cell(grid, graph, result.cells[c]);
        } catch (const std::exception& e) {
            result.cells[c].ok = false;
            result.cells[c].error = e.what();
        }
    }
    return result;
}

namespace {

// Solves the 4x4 normal equations by Gaussian elimination with pivoting.
std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12) throw std::runtime_error("rank-deficient design");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 4> x{};
    for (int k = 0; k < 4; ++k) x[k] = b[k] / a[k][k];
    return x;
}

std::array<std::array<double, 4>, 4> invert4(std::array<std::array<double, 4>, 4> a) {
    std::array<std::array<double, 4>, 4> inv{};
    for (int k = 0; k < 4; ++k) inv[k][k] = 1.0;
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12) throw std::runtime_error("rank-deficient design");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (int k = 0; k < 4; ++k) {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (int k = 0; k < 4; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

MetamodelFit fit_metamodel(const SweepResult& sweep, const std::string& response,
                           const std::string& model) {
    if (response != "mse" && response != "hpd")
        throw std::invalid_argument("fit_metamodel: response must be mse or hpd");
    std::vector<std::array<double, 3>> raw;
    std::vector<double> y;
    for (const auto& cell : sweep.cells) {
        if (!cell.ok || cell.model != model) continue;
        raw.push_back({cell.bin_width, cell.eta, cell.phi});
        y.push_back(response == "mse" ? cell.mse : cell.mean_hpd);
    }
    const std::size_t n = y.size();
    if (n < 5) throw std::invalid_argument("fit_metamodel: need >= 5 grid cells");

    // MinMax-normalize the regressors.
    std::array<double, 3> lo{}, hi{};
    for (int k = 0; k < 3; ++k) {
        lo[k] = hi[k] = raw[0][k];
        for (const auto& row : raw) {
            lo[k] = std::min(lo[k], row[k]);
            hi[k] = std::max(hi[k], row[k]);
        }
        if (hi[k] == lo[k]) throw std::runtime_error("rank-deficient design");
    }
    std::vector<std::array<double, 4>> design(n);
    for (std::size_t r = 0; r < n; ++r) {
        design[r][0] = 1.0;
        for (int k = 0; k < 3; ++k) design[r][k + 1] = (raw[r][k] - lo[k]) / (hi[k] - lo[k]);
    }

    std::array<std::array<double, 4>, 4> xtx{};
    std::array<double, 4> xty{};
    for (std::size_t r = 0; r < n; ++r)
        for (int a = 0; a < 4; ++a) {
            xty[a] += design[r][a] * y[r];
            for (int b = 0; b < 4; ++b) xtx[a][b] += design[r][a] * design[r][b];
        }
    const auto beta = solve4(xtx, xty);
    const auto xtx_inv = invert4(xtx);

    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fitted = 0.0;
        for (int a = 0; a < 4; ++a) fitted += design[r][a] * beta[a];
        rss += (y[r] - fitted) * (y[r] - fitted);
    }
    const double dof = static_cast<double>(n) - 4.0;
    const double s2 = rss / dof;

    MetamodelFit fit;
    fit.model = model;
    fit.response = response;
    fit.n_cells = n;
    fit.beta = beta;
    for (int a = 0; a < 4; ++a) {
        const double se = std::sqrt(std::max(0.0, s2 * xtx_inv[a][a]));
        fit.p_values[a] = se > 0.0 ? student_t_two_sided_p(beta[a] / se, dof) : 0.0;
    }
    for (int k = 0; k < 3; ++k) {
        std::vector<double> xs;
        for (const auto& row : raw) xs.push_back(row[k]);
        fit.correlations[k] = pearson(xs, y);
    }
    return fit;
}

SobolIndices sobol_indices(const std::function<double(const std::vector<double>&)>& f,
                           std::size_t dim, std::size_t n_samples, std::size_t bootstrap,
                           std::uint64_t seed) {
    if (dim == 0 || n_samples < 2) throw std::invalid_argument("sobol_indices: bad sizes");
    auto rng = make_rng(seed, 0x50b01ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::vector<double>> a(n_samples, std::vector<double>(dim)), b = a;
    for (std::size_t r = 0; r < n_samples; ++r)
        for (std::size_t k = 0; k < dim; ++k) {
            a[r][k] = unif(rng);
            b[r][k] = unif(rng);
        }
    std::vector<double> fa(n_samples), fb(n_samples);
    std::vector<std::vector<double>> fab(dim, std::vector<double>(n_samples));
    for (std::size_t r = 0; r < n_samples; ++r) {
        fa[r] = f(a[r]);
        fb[r] = f(b[r]);
    }
    std::vector<double> probe(dim);
    for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t r = 0; r < n_samples; ++r) {
            probe = a[r];
            probe[k] = b[r][k];
            fab[k][r] = f(probe);
        }

    auto estimate = [&](const std::vector<std::size_t>& rows, std::vector<double>& first,
                        std::vector<double>& total) {
        double m = 0.0;
        for (std::size_t r : rows) m += fa[r] + fb[r];
        m /= static_cast<double>(2 * rows.size());
        double v = 0.0;
        for (std::size_t r : rows) {
            v += (fa[r] - m) * (fa[r] - m);
            v += (fb[r] - m) * (fb[r] - m);
        }
        v /= static_cast<double>(2 * rows.size() - 1);
        first.assign(dim, 0.0);
        total.assign(dim, 0.0);
        if (v <= 0.0) return;
        for (std::size_t k = 0; k < dim; ++k) {
            double s = 0.0, t = 0.0;
            for (std::size_t r : rows) {
                const double db = fb[r] - fab[k][r];
                s += db * db;  // Jansen first-order: 1 - E[(f_B - f_ABi)^2]/(2V)
                const double da = fa[r] - fab[k][r];
                t += da * da;  // Jansen total
            }
            first[k] = 1.0 - s / (2.0 * static_cast<double>(rows.size())) / v;
            total[k] = t / (2.0 * static_cast<double>(rows.size())) / v;
        }
    };

    SobolIndices out;
    std::vector<std::size_t> all(n_samples);
    for (std::size_t r = 0; r < n_samples; ++r) all[r] = r;
    estimate(all, out.first, out.total);

    if (bootstrap > 0) {
        std::vector<std::vector<double>> first_samples(dim), total_samples(dim);
        std::uniform_int_distribution<std::size_t> pick(0, n_samples - 1);
        std::vector<std::size_t> rows(n_samples);
        std::vector<double> first, total;
        for (std::size_t rep = 0; rep < bootstrap; ++rep) {
            for (auto& r : rows) r = pick(rng);
            estimate(rows, first, total);
            for (std::size_t k = 0; k < dim; ++k) {
                first_samples[k].push_back(first[k]);
                total_samples[k].push_back(total[k]);
            }
        }
        auto pctl = [](std::vector<double> v, double q) {
            std::sort(v.begin(), v.end());
            const double idx = q * static_cast<double>(v.size() - 1);
            const auto k = static_cast<std::size_t>(idx);
            const double frac = idx - static_cast<double>(k);
            return k + 1 < v.size() ? v[k] * (1.0 - frac) + v[k + 1] * frac : v[k];
        };
        for (std::size_t k = 0; k < dim; ++k) {
            out.first_ci.push_back({pctl(first_samples[k], 0.025), pctl(first_samples[k], 0.975)});
            out.total_ci.push_back({pctl(total_samples[k], 0.025), pctl(total_samples[k], 0.975)});
        }
    }
    return out;
}

void attach_sobol(MetamodelFit& fit, std::size_t n_samples, std::size_t bootstrap,
                  std::uint64_t seed) {
    const auto beta = fit.beta;
    const auto f = [beta](const std::vector<double>& x) {
        return beta[0] + beta[1] * x[0] + beta[2] * x[1] + beta[3] * x[2];
    };
    const auto idx = sobol_indices(f, 3, n_samples, bootstrap, seed);
    for (int k = 0; k < 3; ++k) {
        fit.sobol_first[k] = idx.first[k];
        fit.sobol_total[k] = idx.total[k];
        fit.sobol_first_ci[k] = idx.first_ci[k];
        fit.sobol_total_ci[k] = idx.total_ci[k];
    }
}

namespace {

double validation_mse(const Mat& a_hat, const ObservationSet& val) {
    double sum = 0.0;
    for (std::size_t n = 0; n < val.N; ++n)
        for (std::size_t j = 0; j < val.S; ++j) {
            double pred = 0.0;
            for (std::size_t i = 0; i < val.S; ++i) pred += val.X(n, i) * a_hat(i, j);
            const double d = pred - val.Y(n, j);
            sum += d * d;
        }
    return sum / static_cast<double>(val.N * val.S);
}

ObservationSet prefix(const ObservationSet& pool, std::size_t n) {
    ObservationSet out;
    out.S = pool.S;
    out.N = n;
    out.station_labels = pool.station_labels;
    out.X = Mat(n, pool.S);
    out.Y = Mat(n, pool.S);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < pool.S; ++s) {
            out.X(r, s) = pool.X(r, s);
            out.Y(r, s) = pool.Y(r, s);
        }
    return out;
}

}  // namespace

std::vector<RegStudyRow> regularization_study(const GenAConfig& base,
                                              const std::vector<std::size_t>& n_list,
                                              std::size_t validation_n,
                                              const SamplerConfig& sampler) {
    base.validate();
    if (n_list.empty()) throw std::invalid_argument("regularization_study: empty N list");
    const ODMatrix truth = sample_od_matrix_a(base.S, base.seed);

    GenAConfig pool_cfg = base;
    pool_cfg.N = *std::max_element(n_list.begin(), n_list.end());
    const ObservationSet pool = generate_exits_for(truth, pool_cfg, 1);

    GenAConfig val_cfg = base;
    val_cfg.N = validation_n;
    const ObservationSet validation = generate_exits_for(truth, val_cfg, 2);

    std::vector<RegStudyRow> rows;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const std::size_t n = n_list[idx];
        const ObservationSet train = prefix(pool, n);
        RegStudyRow row;
        row.N = n;
        for (const bool reg : {true, false}) {
            const IBModel model = make_ib_model(train, reg);
            SamplerConfig cfg = sampler;
            cfg.seed = derive_seed(sampler.seed, idx, reg ? 1 : 2);
            const auto draws = fit_ib(model, cfg);
            const double mse = validation_mse(posterior_mean_matrix(draws, base.S), validation);
            (reg ? row.bayes_reg : row.bayes_unreg) = mse;
        }
        for (const bool reg : {true, false}) {
            const auto sol = solve_qp(train, reg);
            (reg ? row.qp_reg : row.qp_unreg) = validation_mse(sol.a_hat, validation);
        }
        rows.push_back(row);
    }
    return rows;
}

PresetExperiment preset_experiment(const std::string& name) {
    for (const auto& p : all_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<PresetExperiment> all_presets() {
    return {{"worst", 5.0, 1.0, 1000.0}, {"best_ib", 60.0, 0.0, 10.0}, {"best_ad", 60.0, 1.0, 10.0}};
}

}  // namespace odest
