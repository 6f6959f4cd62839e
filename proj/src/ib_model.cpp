#include "odest/ib_model.hpp"

#include <cmath>
#include <stdexcept>

#include "odest/od_point.hpp"
#include "odest/rng.hpp"
#include "odest/stats.hpp"

namespace odest {

IBModel make_ib_model(ObservationSet obs, bool regularized, double dirichlet_c,
                      std::optional<std::vector<std::uint8_t>> structural_zeros) {
    validate_observation_set(obs);
    if (!(dirichlet_c > 0.0)) throw std::invalid_argument("make_ib_model: c must be > 0");
    IBModel m;
    m.layout = OdParamLayout(obs.S, /*has_intercepts=*/true, structural_zeros);
    m.structural_zeros = std::move(structural_zeros);
    m.dirichlet_c = dirichlet_c;
    m.regularized = regularized;
    m.xbar.assign(obs.S, 0.0);
    m.ybar.assign(obs.S, 0.0);
    for (std::size_t n = 0; n < obs.N; ++n)
        for (std::size_t s = 0; s < obs.S; ++s) {
            m.xbar[s] += obs.X(n, s);
            m.ybar[s] += obs.Y(n, s);
        }
    for (std::size_t s = 0; s < obs.S; ++s) {
        m.xbar[s] /= static_cast<double>(obs.N);
        m.ybar[s] /= static_cast<double>(obs.N);
    }
    m.obs = std::move(obs);
    return m;
}

std::vector<double> ib_mu(const Mat& alpha, const double* x_row, const std::vector<double>& r) {
    const std::size_t S = alpha.cols();
    std::vector<double> mu(r);
    mu.resize(S, 0.0);
    for (std::size_t i = 0; i < S; ++i) {
        const double xi = x_row[i];
        const double* arow = alpha.row(i);
        for (std::size_t j = 0; j < S; ++j) mu[j] += arow[j] * xi;  // alpha(i,i) == 0
    }
    return mu;
}

namespace {

// Likelihood sum and (optionally) its gradient. Destinations are independent
// and every thread reads/writes only row j of the transposed matrices, so
// the loop parallelizes without atomics or shared cache lines.
double ib_likelihood(const IBModel& m, const Mat& alpha_t, const std::vector<double>& sigma,
                     const std::vector<double>& r, Mat* grad_alpha_t,
                     std::vector<double>* grad_sigma, std::vector<double>* grad_r) {
    const std::size_t S = m.obs.S, N = m.obs.N;
    const Mat& X = m.obs.X;
    const Mat& Y = m.obs.Y;
    double lp = 0.0;
#pragma omp parallel for reduction(+ : lp) schedule(static) if (S * N > 1024)
    for (std::size_t j = 0; j < S; ++j) {
        const double sj = sigma[j];
        const double* aj = alpha_t.row(j);
        double* gj = grad_alpha_t ? grad_alpha_t->row(j) : nullptr;
        double gs = 0.0, gr = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double* x = X.row(n);
            double mu = r[j];
            for (std::size_t i = 0; i < S; ++i) mu += aj[i] * x[i];
            if (gj) {
                const auto ev = truncnorm_eval(Y(n, j), mu, sj);
                lp += ev.lp;
                gs += ev.d_sigma;
                gr += ev.d_mu;
                for (std::size_t i = 0; i < S; ++i) gj[i] += ev.d_mu * x[i];
            } else {
                lp += truncnorm_lpdf(Y(n, j), mu, sj);
            }
        }
        if (m.regularized) {
            double mubar = 0.0;  // no intercept in the expected-value component
            for (std::size_t i = 0; i < S; ++i) mubar += aj[i] * m.xbar[i];
            if (gj) {
                const auto ev = truncnorm_eval(m.ybar[j], mubar, sj);
                lp += ev.lp;
                gs += ev.d_sigma;
                for (std::size_t i = 0; i < S; ++i) gj[i] += ev.d_mu * m.xbar[i];
            } else {
                lp += truncnorm_lpdf(m.ybar[j], mubar, sj);
            }
        }
        if (grad_sigma) (*grad_sigma)[j] = gs;
        if (grad_r) (*grad_r)[j] = gr;
    }
    return lp;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

}  // namespace

double ib_log_posterior(const IBModel& m, const std::vector<double>& u) {
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    const Mat alpha_t = transpose(d.alpha);
    double lp = ib_likelihood(m, alpha_t, d.sigma, d.r, nullptr, nullptr, nullptr);
    if (m.regularized)
        for (double rj : d.r) lp -= rj * rj;
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    return lp;
}

double ib_log_posterior_grad(const IBModel& m, const std::vector<double>& u,
                             std::vector<double>& grad) {
    const std::size_t S = m.obs.S;
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    const Mat alpha_t = transpose(d.alpha);
    Mat grad_alpha_t(S, S);
    std::vector<double> grad_sigma(S, 0.0), grad_r(S, 0.0);
    double lp = ib_likelihood(m, alpha_t, d.sigma, d.r, &grad_alpha_t, &grad_sigma, &grad_r);
    if (m.regularized)
        for (std::size_t j = 0; j < S; ++j) {
            lp -= d.r[j] * d.r[j];
            grad_r[j] -= 2.0 * d.r[j];
        }
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    grad.assign(m.layout.dim_unconstrained(), 0.0);
    od_chain_rule(m.layout, d, m.dirichlet_c, grad_alpha_t, grad_sigma, grad_r, grad.data());
    return lp;
}

// --- serial reference -------------------------------------------------------

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

double ref_truncnorm_lpdf(double y, double mu, double sigma) {
    const double z = (y - mu) / sigma;
    return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z -
           std::log(0.5 * std::erfc(-(mu / sigma) * kInvSqrt2));
}

double ref_mills(double h) {
    const double pdf = std::exp(-0.5 * h * h) / std::sqrt(2.0 * M_PI);
    return pdf / (0.5 * std::erfc(-h * kInvSqrt2));
}

// Row stick-breaking Jacobian recomputed from the simplex point itself.
double ref_row_log_jacobian(const std::vector<double>& x) {
    double stick = 1.0, lj = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double z = x[k] / stick;
        lj += std::log(stick) + std::log(z) + std::log(1.0 - z);
        stick -= x[k];
    }
    return lj;
}
}  // namespace

double ib_log_posterior_serial(const IBModel& m, const std::vector<double>& u) {
    const std::size_t S = m.obs.S, N = m.obs.N;
    Mat alpha;
    std::vector<double> sigma, r;
    m.layout.decode(u.data(), alpha, sigma, r);

    double lp = 0.0;
    for (std::size_t j = 0; j < S; ++j)
        for (std::size_t n = 0; n < N; ++n) {
            double mu = r[j];
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) mu += alpha(i, j) * m.obs.X(n, i);
            lp += ref_truncnorm_lpdf(m.obs.Y(n, j), mu, sigma[j]);
        }
    if (m.regularized) {
        for (std::size_t j = 0; j < S; ++j) {
            double mubar = 0.0;
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) mubar += alpha(i, j) * m.xbar[i];
            lp += ref_truncnorm_lpdf(m.ybar[j], mubar, sigma[j]);
            lp -= r[j] * r[j];
        }
    }
    for (std::size_t i = 0; i < S; ++i) {
        std::vector<double> x;
        for (std::size_t j : m.layout.free_cols(i)) x.push_back(alpha(i, j));
        lp += ref_row_log_jacobian(x);
        if (m.dirichlet_c != 1.0)
            for (double xv : x) lp += (m.dirichlet_c - 1.0) * std::log(xv);
    }
    for (std::size_t j = 0; j < S; ++j) lp += std::log(sigma[j]);
    return lp;
}

double ib_log_posterior_grad_serial(const IBModel& m, const std::vector<double>& u,
                                    std::vector<double>& grad) {
    const std::size_t S = m.obs.S, N = m.obs.N;
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    Mat grad_alpha_t(S, S);
    std::vector<double> grad_sigma(S, 0.0), grad_r(S, 0.0);
    double lp = 0.0;
    for (std::size_t j = 0; j < S; ++j) {
        const double sj = d.sigma[j];
        for (std::size_t n = 0; n < N; ++n) {
            double mu = d.r[j];
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) mu += d.alpha(i, j) * m.obs.X(n, i);
            const double y = m.obs.Y(n, j);
            lp += ref_truncnorm_lpdf(y, mu, sj);
            const double zz = (y - mu) / sj;
            const double mills = ref_mills(mu / sj);
            const double dmu = zz / sj - mills / sj;
            grad_sigma[j] += -1.0 / sj + zz * zz / sj + mills * (mu / sj) / sj;
            grad_r[j] += dmu;
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) grad_alpha_t(j, i) += dmu * m.obs.X(n, i);
        }
        if (m.regularized) {
            double mubar = 0.0;
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) mubar += d.alpha(i, j) * m.xbar[i];
            lp += ref_truncnorm_lpdf(m.ybar[j], mubar, sj);
            const double zz = (m.ybar[j] - mubar) / sj;
            const double mills = ref_mills(mubar / sj);
            const double dmu = zz / sj - mills / sj;
            grad_sigma[j] += -1.0 / sj + zz * zz / sj + mills * (mubar / sj) / sj;
            for (std::size_t i = 0; i < S; ++i)
                if (i != j) grad_alpha_t(j, i) += dmu * m.xbar[i];
            lp -= d.r[j] * d.r[j];
            grad_r[j] -= 2.0 * d.r[j];
        }
    }
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    grad.assign(m.layout.dim_unconstrained(), 0.0);
    od_chain_rule(m.layout, d, m.dirichlet_c, grad_alpha_t, grad_sigma, grad_r, grad.data());
    return lp;
}

Mat ib_posterior_predictive(const IBModel& m, const PosteriorDraws& draws,
                            const std::vector<double>& x_row, std::uint64_t seed) {
    const std::size_t S = m.obs.S;
    if (draws.total_draws() == 0) throw std::invalid_argument("ib_posterior_predictive: no draws");
    if (x_row.size() != S) throw std::invalid_argument("ib_posterior_predictive: x_row size");
    const std::size_t n_alpha = S * (S - 1);
    if (draws.P() < n_alpha + 2 * S)
        throw std::invalid_argument("ib_posterior_predictive: draw layout too small");
    Mat out(draws.total_draws(), S);
    std::size_t row = 0;
    for (std::size_t c = 0; c < draws.chains; ++c)
        for (std::size_t dd = 0; dd < draws.draws_per_chain; ++dd, ++row) {
            auto rng = make_rng(seed, row);
            const double* v = draws.values[c].row(dd);
            for (std::size_t j = 0; j < S; ++j) {
                double mu = v[n_alpha + S + j];  // intercept r_j
                for (std::size_t i = 0; i < S; ++i) {
                    if (i == j) continue;
                    // row-major off-diagonal index of alpha(i,j)
                    const std::size_t p = i * (S - 1) + (j < i ? j : j - 1);
                    mu += v[p] * x_row[i];
                }
                out(row, j) = truncnorm_sample(mu, v[n_alpha + j], rng);
            }
        }
    return out;
}

std::vector<double> ib_predict_uncorrected(const Mat& a_mean, const std::vector<double>& xbar) {
    return vec_mat(xbar, a_mean);
}

}  // namespace odest
