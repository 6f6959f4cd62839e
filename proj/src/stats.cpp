#include "odest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace odest {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;

// Asymptotic tail series for Phi(x), x << 0:
//   Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
// Returns the bracketed series; converges to machine precision for x <= -20.
double tail_series(double x) {
    const double inv_x2 = 1.0 / (x * x);
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= 12; ++n) {
        term *= -(2.0 * n - 1.0) * inv_x2;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}
}  // namespace

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double log_sum_exp(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double vmax = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - vmax);
    return vmax + std::log(s);
}

double log_normal_cdf(double x) {
    if (x >= 37.5) return 0.0;  // Phi(x) == 1 to double precision
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x * kSqrt1_2));
    if (x > -20.0) return std::log(0.5 * std::erfc(-x * kSqrt1_2));
    return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(tail_series(x));
}

double mills_ratio(double x) {
    if (x <= -20.0) return -x / tail_series(x);
    if (x >= 37.5) return 0.0;  // pdf underflows, cdf is 1
    const double log_pdf = -0.5 * x * x - kLogSqrt2Pi;
    return std::exp(log_pdf - log_normal_cdf(x));
}

double normal_lpdf(double y, double mu, double sigma) {
    const double z = (y - mu) / sigma;
    return -kLogSqrt2Pi - std::log(sigma) - 0.5 * z * z;
}

double truncnorm_lpdf(double y, double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("truncnorm_lpdf: sigma must be > 0");
    if (y < 0.0) throw std::invalid_argument("truncnorm_lpdf: y must be >= 0");
    return normal_lpdf(y, mu, sigma) - log_normal_cdf(mu / sigma);
}

TruncnormGrad truncnorm_lpdf_grad(double y, double mu, double sigma) {
    const double z = (y - mu) / sigma;
    const double h = mu / sigma;
    const double m = mills_ratio(h);
    return {z / sigma - m / sigma, -1.0 / sigma + z * z / sigma + m * h / sigma};
}

TruncnormEval truncnorm_eval(double y, double mu, double sigma) {
    const double z = (y - mu) / sigma;
    const double h = mu / sigma;
    const double log_cdf = log_normal_cdf(h);
    double m;
    if (h <= -20.0)
        m = -h / tail_series(h);
    else if (h >= 37.5)
        m = 0.0;
    else
        m = std::exp(-0.5 * h * h - kLogSqrt2Pi - log_cdf);
    TruncnormEval out;
    out.lp = -kLogSqrt2Pi - std::log(sigma) - 0.5 * z * z - log_cdf;
    out.d_mu = (z - m) / sigma;
    out.d_sigma = (-1.0 + z * z + m * h) / sigma;
    return out;
}

double truncnorm_mean(double mu, double sigma) {
    return mu + sigma * mills_ratio(mu / sigma);
}

double truncnorm_sample(double mu, double sigma, RngEngine& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("truncnorm_sample: sigma must be > 0");
    const double a = -mu / sigma;  // standardized lower bound
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (a < 0.25) {
        std::normal_distribution<double> norm(0.0, 1.0);
        for (;;) {
            const double z = norm(rng);
            if (z >= a) return mu + sigma * z;
        }
    }
    // Robert (1995) translated-exponential proposal for a truncated far tail.
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double u = unif(rng);
        const double x = a - std::log1p(-u) / alpha;
        const double d = x - alpha;
        if (unif(rng) <= std::exp(-0.5 * d * d)) return mu + sigma * x;
    }
}

namespace {
// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}
}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_beta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double front = std::exp(ln_beta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double nu) {
    if (nu <= 0.0) throw std::invalid_argument("student_t_two_sided_p: nu must be > 0");
    return reg_inc_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
    return 0.5 * (v[mid - 1] + hi);
}

}  // namespace odest
