#include "odest/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "odest/stats.hpp"

namespace odest {

double mse_vs_truth(const Mat& estimates, const ODMatrix& truth) {
    const std::size_t S = truth.S;
    if (estimates.rows() != S || estimates.cols() != S)
        throw std::invalid_argument("mse_vs_truth: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            const double d = estimates(i, j) - truth.alpha(i, j);
            sum += d * d;
        }
    return sum / static_cast<double>(S * S);
}

std::pair<double, double> hpd_interval(std::vector<double> samples, double prob) {
    if (samples.size() < 50) throw std::invalid_argument("hpd_interval: need >= 50 samples");
    if (!(prob > 0.0 && prob <= 1.0)) throw std::invalid_argument("hpd_interval: bad prob");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::size_t m = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(n)));
    m = std::clamp<std::size_t>(m, 1, n);
    std::size_t best = 0;
    double best_width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + m <= n; ++i) {
        const double width = samples[i + m - 1] - samples[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {samples[best], samples[best + m - 1]};
}

double r_hat(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) throw std::invalid_argument("r_hat: need >= 2 chains");
    for (const auto& c : chains)
        if (c.size() < 10) throw std::invalid_argument("r_hat: need >= 10 draws per chain");

    // Split each chain in half: within-chain drift then shows up as
    // between-sequence variance.
    std::vector<std::vector<double>> seqs;
    std::size_t half = chains.front().size();
    for (const auto& c : chains) half = std::min(half, c.size());
    half /= 2;
    for (const auto& c : chains) {
        seqs.emplace_back(c.begin(), c.begin() + half);
        seqs.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
    }

    const double n = static_cast<double>(half);
    std::vector<double> seq_means;
    double w = 0.0;
    for (const auto& s : seqs) {
        seq_means.push_back(mean(s));
        w += sample_variance(s);
    }
    w /= static_cast<double>(seqs.size());
    if (w == 0.0) return 1.0;  // constant parameter
    const double b_over_n = sample_variance(seq_means);
    const double var_plus = (n - 1.0) / n * w + b_over_n;
    return std::sqrt(var_plus / w);
}

namespace {

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// Biased autocovariance (divides by n) of a centred series via zero-padded
// FFT convolution.
std::vector<double> autocovariance_fft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const double xbar = mean(x);
    std::size_t padded = 1;
    while (padded < 2 * n) padded <<= 1;

    std::vector<double> buf(padded, 0.0);
    for (std::size_t t = 0; t < n; ++t) buf[t] = x[t] - xbar;
    std::vector<std::complex<double>> freq(padded / 2 + 1);

    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(padded), buf.data(),
                                   reinterpret_cast<fftw_complex*>(freq.data()), FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(padded),
                                   reinterpret_cast<fftw_complex*>(freq.data()), buf.data(),
                                   FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (auto& f : freq) f = std::norm(f);
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    std::vector<double> acov(n);
    const double scale = 1.0 / (static_cast<double>(padded) * static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) acov[k] = buf[k] * scale;
    return acov;
}

}  // namespace

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
    if (chains.empty()) throw std::invalid_argument("effective_sample_size: no chains");
    std::size_t n = chains.front().size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (n < 10) throw std::invalid_argument("effective_sample_size: need >= 10 draws per chain");
    const std::size_t m = chains.size();

    std::vector<std::vector<double>> acov;
    std::vector<double> chain_means;
    double mean_var = 0.0;
    for (const auto& c : chains) {
        std::vector<double> trimmed(c.begin(), c.begin() + n);
        chain_means.push_back(mean(trimmed));
        acov.push_back(autocovariance_fft(trimmed));
        mean_var += acov.back()[0] * static_cast<double>(n) / (static_cast<double>(n) - 1.0);
    }
    mean_var /= static_cast<double>(m);

    double var_plus = mean_var * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
    if (m > 1) var_plus += sample_variance(chain_means);
    if (var_plus == 0.0) return static_cast<double>(m * n);  // constant parameter

    auto mean_acov = [&](std::size_t t) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) s += acov[c][t];
        return s / static_cast<double>(m);
    };

    // Geyer initial positive sequence over paired autocorrelations.
    std::vector<double> rho(n, 0.0);
    double rho_even = 1.0;
    rho[0] = rho_even;
    double rho_odd = 1.0 - (mean_var - mean_acov(1)) / var_plus;
    rho[1] = rho_odd;
    std::size_t s = 1;
    while (s < n - 4 && rho_even + rho_odd > 0.0) {
        rho_even = 1.0 - (mean_var - mean_acov(s + 1)) / var_plus;
        rho_odd = 1.0 - (mean_var - mean_acov(s + 2)) / var_plus;
        if (rho_even + rho_odd >= 0.0) {
            rho[s + 1] = rho_even;
            rho[s + 2] = rho_odd;
        }
        s += 2;
    }
    const std::size_t max_s = s;
    if (rho_even > 0.0 && max_s + 1 < n) rho[max_s + 1] = rho_even;

    // Geyer initial monotone sequence: pair sums must not increase.
    for (std::size_t t = 1; t + 2 <= max_s; t += 2) {
        if (rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]) {
            rho[t + 1] = 0.5 * (rho[t - 1] + rho[t]);
            rho[t + 2] = rho[t + 1];
        }
    }

    const double total = static_cast<double>(m * n);
    double tau = -1.0;
    for (std::size_t t = 0; t <= std::min(max_s, n - 1); ++t) tau += 2.0 * rho[t];
    if (max_s + 1 < n) tau += rho[max_s + 1];
    tau = std::max(tau, 1.0 / std::log10(total));
    return total / tau;
}

std::vector<std::vector<double>> parameter_chains(const PosteriorDraws& draws, std::size_t p) {
    std::vector<std::vector<double>> out;
    for (std::size_t c = 0; c < draws.chains; ++c) {
        std::vector<double> series(draws.draws_per_chain);
        for (std::size_t d = 0; d < draws.draws_per_chain; ++d) series[d] = draws.values[c](d, p);
        out.push_back(std::move(series));
    }
    return out;
}

namespace {

// Off-diagonal flat index of alpha(i,j) in the draw layout.
std::size_t alpha_param_index(std::size_t i, std::size_t j, std::size_t S) {
    return i * (S - 1) + (j < i ? j : j - 1);
}

std::vector<double> pooled_draws(const PosteriorDraws& draws, std::size_t p, std::size_t thin) {
    std::vector<double> out;
    for (std::size_t c = 0; c < draws.chains; ++c)
        for (std::size_t d = 0; d < draws.draws_per_chain; d += thin)
            out.push_back(draws.values[c](d, p));
    return out;
}

}  // namespace

Mat posterior_mean_matrix(const PosteriorDraws& draws, std::size_t S) {
    if (draws.P() < S * (S - 1))
        throw std::invalid_argument("posterior_mean_matrix: layout too small for S");
    Mat mean(S, S);
    const double total = static_cast<double>(draws.total_draws());
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            if (i == j) continue;
            const std::size_t p = alpha_param_index(i, j, S);
            double s = 0.0;
            for (std::size_t c = 0; c < draws.chains; ++c)
                for (std::size_t d = 0; d < draws.draws_per_chain; ++d)
                    s += draws.values[c](d, p);
            mean(i, j) = s / total;
        }
    return mean;
}

double mean_hpd(const PosteriorDraws& draws, std::size_t S, double prob) {
    if (draws.P() < S * (S - 1)) throw std::invalid_argument("mean_hpd: layout too small for S");
    double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(dynamic)
    for (std::size_t p = 0; p < S * (S - 1); ++p) {
        auto [lo, hi] = hpd_interval(pooled_draws(draws, p, 1), prob);
        sum += hi - lo;
    }
    return sum / static_cast<double>(S * S);
}

Mat absolute_od_flow(const Mat& a_mean, const Mat& x_window) {
    if (x_window.cols() != a_mean.rows())
        throw std::invalid_argument("absolute_od_flow: shape mismatch");
    return mat_mul(x_window, a_mean);
}

Mat od_demand_matrix(const Mat& a_mean, const std::vector<double>& x_totals) {
    const std::size_t S = a_mean.rows();
    if (x_totals.size() != S) throw std::invalid_argument("od_demand_matrix: shape mismatch");
    Mat demand(S, S);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) demand(i, j) = x_totals[i] * a_mean(i, j);
    return demand;
}

DiagnosticsReport diagnose(const PosteriorDraws& draws, std::size_t S,
                           const std::optional<ODMatrix>& truth,
                           const std::optional<Mat>& qp_estimate, const std::vector<double>& xbar,
                           const std::vector<double>& ybar, std::size_t predictive_thin,
                           int max_tree_depth) {
    if (predictive_thin == 0)
        predictive_thin = (draws.total_draws() + 999) / 1000;  // about 1000 retained draws
    DiagnosticsReport rep;
    rep.S = S;
    rep.chains = draws.chains;
    rep.draws_per_chain = draws.draws_per_chain;
    rep.divergences = draws.divergence_count();
    for (const auto& chain : draws.tree_depth)
        for (int d : chain)
            if (d >= max_tree_depth) ++rep.tree_depth_saturations;

    const Mat mean_matrix = posterior_mean_matrix(draws, S);
    if (truth) rep.mse_mcmc = mse_vs_truth(mean_matrix, *truth);
    if (truth && qp_estimate) rep.mse_qp = mse_vs_truth(*qp_estimate, *truth);
    rep.mean_hpd_95 = mean_hpd(draws, S);

    const std::size_t n_alpha = S * (S - 1);
    for (std::size_t p = 0; p < n_alpha; ++p) rep.param_names.push_back(draws.param_names[p]);
    if (draws.chains >= 2 && draws.draws_per_chain >= 10) {
        rep.r_hat_per_param.resize(n_alpha);
        rep.ess_ratio_per_param.resize(n_alpha);
#pragma omp parallel for schedule(dynamic)
        for (std::size_t p = 0; p < n_alpha; ++p) {
            const auto chains = parameter_chains(draws, p);
            rep.r_hat_per_param[p] = r_hat(chains);
            rep.ess_ratio_per_param[p] =
                effective_sample_size(chains) / static_cast<double>(draws.total_draws());
        }
        rep.r_hat_max = *std::max_element(rep.r_hat_per_param.begin(), rep.r_hat_per_param.end());
        rep.ess_ratio_min =
            *std::min_element(rep.ess_ratio_per_param.begin(), rep.ess_ratio_per_param.end());
    }

    if (!xbar.empty() && !ybar.empty()) {
        // Posterior predictive of the uncorrected location parameter on a
        // thinned draw sample.
        Mat thin_mean(S, S);
        const std::size_t n_alpha_cells = S * (S - 1);
        double retained = 0.0;
        for (std::size_t d = 0; d < draws.draws_per_chain; d += predictive_thin) retained += 1.0;
        retained *= static_cast<double>(draws.chains);
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t j = 0; j < S; ++j) {
                if (i == j) continue;
                const std::size_t p = alpha_param_index(i, j, S);
                double sum = 0.0;
                for (std::size_t c = 0; c < draws.chains; ++c)
                    for (std::size_t d = 0; d < draws.draws_per_chain; d += predictive_thin)
                        sum += draws.values[c](d, p);
                thin_mean(i, j) = sum / retained;
            }
        (void)n_alpha_cells;
        const auto pred = vec_mat(xbar, thin_mean);
        rep.predictive_rel_error.resize(S);
        for (std::size_t j = 0; j < S; ++j)
            rep.predictive_rel_error[j] =
                ybar[j] > 0.0 ? std::abs(pred[j] - ybar[j]) / ybar[j]
                              : std::numeric_limits<double>::quiet_NaN();
    }

    std::size_t below = 0;
    rep.row_max_coefficient.assign(S, 0.0);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            if (i == j) continue;
            if (mean_matrix(i, j) < 1e-9) ++below;
            rep.row_max_coefficient[i] = std::max(rep.row_max_coefficient[i], mean_matrix(i, j));
        }
    rep.sparsity_below_1e9 = static_cast<double>(below) / static_cast<double>(n_alpha);
    return rep;
}

}  // namespace odest
