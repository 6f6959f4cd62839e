#include "odest/netgen_a.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace odest {

void GenAConfig::validate() const {
    if (S < 2) throw std::invalid_argument("GenAConfig: S must be >= 2");
    if (N < 1) throw std::invalid_argument("GenAConfig: N must be >= 1");
    if (mu_x.size() != S) throw std::invalid_argument("GenAConfig: mu_x must have length S");
    for (double m : mu_x)
        if (!(m > 0.0)) throw std::invalid_argument("GenAConfig: mean entry counts must be > 0");
    if (!(phi > 0.0)) throw std::invalid_argument("GenAConfig: phi must be > 0");
}

GenAConfig default_gen_a_config() {
    GenAConfig cfg;
    cfg.S = 15;
    cfg.N = 30;
    cfg.mu_x = {600, 900, 1400, 400, 550, 650, 900, 1000, 750, 450, 200, 650, 750, 1000, 1300};
    cfg.phi = 10.0;
    cfg.seed = 1;
    return cfg;
}

bool sample_dirichlet(const std::vector<double>& conc, RngEngine& rng, std::vector<double>& out) {
    const std::size_t K = conc.size();
    out.resize(K);
    if (K == 1) {
        out[0] = 1.0;
        return true;
    }
    double cmin = conc[0];
    for (double c : conc) cmin = std::min(cmin, c);
    if (cmin >= 0.05) {
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            std::gamma_distribution<double> gamma(conc[k], 1.0);
            out[k] = gamma(rng);
            total += out[k];
        }
        if (!(total > 0.0) || !std::isfinite(total)) return false;
        for (auto& v : out) v /= total;
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> lg(K);
        for (std::size_t k = 0; k < K; ++k) {
            if (conc[k] <= 0.0) {
                lg[k] = -std::numeric_limits<double>::infinity();
                continue;
            }
            std::gamma_distribution<double> boosted(conc[k] + 1.0, 1.0);
            lg[k] = std::log(boosted(rng)) + std::log(unif(rng)) / conc[k];
        }
        const double lmax = *std::max_element(lg.begin(), lg.end());
        if (!std::isfinite(lmax)) return false;
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) total += out[k] = std::exp(lg[k] - lmax);
        for (auto& v : out) v /= total;
    }
    double smax = 0.0;
    for (double v : out) {
        if (!std::isfinite(v)) return false;
        smax = std::max(smax, v);
    }
    return smax < 1.0;
}

ODMatrix sample_od_matrix_a(std::size_t S, std::uint64_t seed) {
    if (S < 2) throw std::invalid_argument("sample_od_matrix_a: S must be >= 2");
    auto rng = make_rng(seed, 0xa0dULL);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    ODMatrix m;
    m.S = S;
    m.alpha = Mat(S, S);
    std::vector<double> row;
    for (std::size_t i = 0; i < S; ++i) {
        // Fresh randomness per attempt restarts the row recipe, including its
        // concentration draw.
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            const double c_i = unif(rng);
            ok = sample_dirichlet(std::vector<double>(S - 1, c_i), rng, row);
        }
        if (!ok)
            throw std::runtime_error("sample_od_matrix_a: degenerate Dirichlet draws at row " +
                                     std::to_string(i));
        // Embed the (S-1)-vector around the zero diagonal.
        for (std::size_t j = 0; j < S; ++j) {
            if (j == i) continue;
            m.alpha(i, j) = row[j < i ? j : j - 1];
        }
    }
    if (auto v = validate_od_matrix(m))
        throw std::runtime_error("sample_od_matrix_a: generated matrix invalid at row " +
                                 std::to_string(v->row) + " (" + v->constraint + ")");
    return m;
}

long long sample_negbin(double mu, double phi, RngEngine& rng) {
    if (!(mu > 0.0) || !(phi > 0.0))
        throw std::invalid_argument("sample_negbin: mu and phi must be > 0");
    std::gamma_distribution<double> gamma(phi, mu / phi);
    const double lambda = gamma(rng);
    if (lambda <= 0.0) return 0;
    std::poisson_distribution<long long> pois(lambda);
    return pois(rng);
}

std::vector<long long> multinomial_split(long long count, const std::vector<double>& p,
                                         RngEngine& rng) {
    std::vector<long long> out(p.size(), 0);
    if (count <= 0) return out;
    std::size_t last_pos = p.size();
    for (std::size_t k = p.size(); k-- > 0;)
        if (p[k] > 0.0) {
            last_pos = k;
            break;
        }
    if (last_pos == p.size()) throw std::invalid_argument("multinomial_split: all-zero weights");
    double remaining_p = 0.0;
    for (double v : p) remaining_p += v;
    long long remaining = count;
    for (std::size_t k = 0; k < last_pos && remaining > 0; ++k) {
        if (p[k] <= 0.0) continue;
        const double frac = std::min(1.0, p[k] / remaining_p);
        std::binomial_distribution<long long> binom(remaining, frac);
        out[k] = binom(rng);
        remaining -= out[k];
        remaining_p -= p[k];
    }
    out[last_pos] += remaining;
    return out;
}

std::pair<ODMatrix, ObservationSet> generate_network_a(const GenAConfig& cfg) {
    cfg.validate();
    ODMatrix truth = sample_od_matrix_a(cfg.S, cfg.seed);
    ObservationSet obs = generate_exits_for(truth, cfg, 0);
    return {std::move(truth), std::move(obs)};
}

ObservationSet generate_exits_for(const ODMatrix& truth, const GenAConfig& cfg,
                                  std::uint64_t stream) {
    cfg.validate();
    if (truth.S != cfg.S) throw std::invalid_argument("generate_exits_for: S mismatch");
    ObservationSet obs;
    obs.S = cfg.S;
    obs.N = cfg.N;
    obs.X = Mat(cfg.N, cfg.S);
    obs.Y = Mat(cfg.N, cfg.S);
    for (std::size_t s = 0; s < cfg.S; ++s) obs.station_labels.push_back("s" + std::to_string(s + 1));

#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < cfg.N; ++n) {
        auto rng = make_rng(cfg.seed, 0x0b5ULL + stream, n);
        std::vector<double> probs(cfg.S);
        for (std::size_t i = 0; i < cfg.S; ++i) {
            const long long x = sample_negbin(cfg.mu_x[i], cfg.phi, rng);
            obs.X(n, i) = static_cast<double>(x);
            for (std::size_t j = 0; j < cfg.S; ++j) probs[j] = truth.alpha(i, j);
            const auto dest = multinomial_split(x, probs, rng);
            for (std::size_t j = 0; j < cfg.S; ++j) obs.Y(n, j) += static_cast<double>(dest[j]);
        }
    }
    return obs;
}

}  // namespace odest
