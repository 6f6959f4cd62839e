#include "odest/ad_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "odest/od_point.hpp"
#include "odest/stats.hpp"

namespace odest {

std::size_t assignment_row_index(std::size_t j, std::size_t n, std::size_t t_a, std::size_t N,
                                 std::size_t T_a) {
    return (j - 1) * N * T_a + (n - 1) * T_a + t_a;
}

ADModel build_assignment(BinnedObservationSet binned, TravelTimeTable delays, double dirichlet_c,
                         std::optional<std::vector<std::uint8_t>> structural_zeros) {
    validate_binned_observation_set(binned);
    if (delays.S != binned.S) throw std::invalid_argument("build_assignment: delay table size");
    const std::size_t S = binned.S, N = binned.N, T = binned.T, T_a = binned.T_a;
    const int gap = binned.window_gap_bins();

    ADModel m;
    m.layout = OdParamLayout(S, /*has_intercepts=*/false, structural_zeros);
    for (std::size_t j = 0; j < S; ++j)
        for (std::size_t i = 0; i < S; ++i) {
            if (i == j) continue;
            const int d = delays.at(i, j);
            if (d < 0 || d > gap)
                throw std::invalid_argument("build_assignment: delay for pair (" +
                                            std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                            ") exceeds the window gap");
        }

    m.H.assign(S, Mat(N * T_a, S));
    for (std::size_t j = 0; j < S; ++j) {
        Mat& Hj = m.H[j];
        for (std::size_t i = 0; i < S; ++i) {
            if (i == j) continue;
            const int delay = delays.at(i, j);
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t ta = 1; ta <= T_a; ++ta) {
                    // Departure bin feeding arrival bin ta through delay.
                    const int td = static_cast<int>(ta) + gap - delay;
                    if (td < 1 || td > static_cast<int>(T)) continue;
                    Hj(n * T_a + (ta - 1), i) = binned.Xb[n](td - 1, i);
                }
        }
    }
    m.delays = std::move(delays);
    m.dirichlet_c = dirichlet_c;
    m.structural_zeros = std::move(structural_zeros);
    m.binned = std::move(binned);
    return m;
}

namespace {

double ad_likelihood(const ADModel& m, const Mat& alpha_t, const std::vector<double>& sigma,
                     Mat* grad_alpha_t, std::vector<double>* grad_sigma) {
    const std::size_t S = m.binned.S, N = m.binned.N, T_a = m.binned.T_a;
    double lp = 0.0;
#pragma omp parallel for reduction(+ : lp) schedule(static) if (S * N * T_a > 1024)
    for (std::size_t j = 0; j < S; ++j) {
        const Mat& Hj = m.H[j];
        const double sj = sigma[j];
        const double* aj = alpha_t.row(j);
        double* gj = grad_alpha_t ? grad_alpha_t->row(j) : nullptr;
        double gs = 0.0;
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t ta = 0; ta < T_a; ++ta) {
                const std::size_t row = n * T_a + ta;
                const double* h = Hj.row(row);
                double mu = 0.0;
                for (std::size_t i = 0; i < S; ++i) mu += aj[i] * h[i];
                const double y = m.binned.Yb[n](ta, j);
                if (gj) {
                    const auto ev = truncnorm_eval(y, mu, sj);
                    lp += ev.lp;
                    gs += ev.d_sigma;
                    for (std::size_t i = 0; i < S; ++i) gj[i] += ev.d_mu * h[i];
                } else {
                    lp += truncnorm_lpdf(y, mu, sj);
                }
            }
        if (grad_sigma) (*grad_sigma)[j] = gs;
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

double ad_log_posterior(const ADModel& m, const std::vector<double>& u) {
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    const Mat alpha_t = transpose(d.alpha);
    double lp = ad_likelihood(m, alpha_t, d.sigma, nullptr, nullptr);
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    return lp;
}

double ad_log_posterior_grad(const ADModel& m, const std::vector<double>& u,
                             std::vector<double>& grad) {
    const std::size_t S = m.binned.S;
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    const Mat alpha_t = transpose(d.alpha);
    Mat grad_alpha_t(S, S);
    std::vector<double> grad_sigma(S, 0.0);
    double lp = ad_likelihood(m, alpha_t, d.sigma, &grad_alpha_t, &grad_sigma);
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    grad.assign(m.layout.dim_unconstrained(), 0.0);
    od_chain_rule(m.layout, d, m.dirichlet_c, grad_alpha_t, grad_sigma, {}, grad.data());
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

double ad_log_posterior_serial(const ADModel& m, const std::vector<double>& u) {
    const std::size_t S = m.binned.S, N = m.binned.N, T_a = m.binned.T_a;
    Mat alpha;
    std::vector<double> sigma, r;
    m.layout.decode(u.data(), alpha, sigma, r);
    double lp = 0.0;
    for (std::size_t j = 0; j < S; ++j)
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t ta = 0; ta < T_a; ++ta) {
                double mu = 0.0;
                for (std::size_t i = 0; i < S; ++i)
                    if (i != j) mu += alpha(i, j) * m.H[j](n * T_a + ta, i);
                lp += ref_truncnorm_lpdf(m.binned.Yb[n](ta, j), mu, sigma[j]);
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

double ad_log_posterior_grad_serial(const ADModel& m, const std::vector<double>& u,
                                    std::vector<double>& grad) {
    const std::size_t S = m.binned.S, N = m.binned.N, T_a = m.binned.T_a;
    OdDecoded d;
    decode_od_point(m.layout, u.data(), d);
    Mat grad_alpha_t(S, S);
    std::vector<double> grad_sigma(S, 0.0);
    double lp = 0.0;
    for (std::size_t j = 0; j < S; ++j) {
        const double sj = d.sigma[j];
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t ta = 0; ta < T_a; ++ta) {
                double mu = 0.0;
                for (std::size_t i = 0; i < S; ++i)
                    if (i != j) mu += d.alpha(i, j) * m.H[j](n * T_a + ta, i);
                const double y = m.binned.Yb[n](ta, j);
                lp += ref_truncnorm_lpdf(y, mu, sj);
                const double zz = (y - mu) / sj;
                const double mills = ref_mills(mu / sj);
                const double dmu = zz / sj - mills / sj;
                grad_sigma[j] += -1.0 / sj + zz * zz / sj + mills * (mu / sj) / sj;
                for (std::size_t i = 0; i < S; ++i)
                    if (i != j) grad_alpha_t(j, i) += dmu * m.H[j](n * T_a + ta, i);
            }
    }
    lp += dirichlet_log_prior(m.layout, d, m.dirichlet_c);
    lp += od_transform_log_jacobian(m.layout, d);
    grad.assign(m.layout.dim_unconstrained(), 0.0);
    od_chain_rule(m.layout, d, m.dirichlet_c, grad_alpha_t, grad_sigma, {}, grad.data());
    return lp;
}

}  // namespace odest
