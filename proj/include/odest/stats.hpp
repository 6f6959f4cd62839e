#pragma once

#include <cstddef>
#include <vector>

#include "odest/rng.hpp"

namespace odest {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)

double logistic(double x);
/// log(1 + exp(x)) without overflow.
double log1p_exp(double x);
/// log sum_k exp(v_k), shifted by the max term.
double log_sum_exp(const std::vector<double>& v);

/// log of the standard normal CDF, numerically stable over the whole line.
/// Uses erfc in the central range and the asymptotic tail series below -20
/// (erfc itself keeps full relative accuracy down to that point).
double log_normal_cdf(double x);

/// Inverse Mills ratio phi(x)/Phi(x), stable for arbitrarily negative x.
double mills_ratio(double x);

double normal_lpdf(double y, double mu, double sigma);

/// Log density of the lower-zero-truncated normal N+(mu, sigma) at y >= 0:
/// normal_lpdf(y) - log Phi(mu/sigma).
double truncnorm_lpdf(double y, double mu, double sigma);

struct TruncnormGrad {
    double d_mu;
    double d_sigma;
};
TruncnormGrad truncnorm_lpdf_grad(double y, double mu, double sigma);

/// Density and gradient in one pass (log Phi evaluated once).
struct TruncnormEval {
    double lp;
    double d_mu;
    double d_sigma;
};
TruncnormEval truncnorm_eval(double y, double mu, double sigma);

/// Mean of N+(mu, sigma): mu + sigma * mills(mu/sigma).
double truncnorm_mean(double mu, double sigma);

/// Exact draw from N+(mu, sigma); rejection from the normal in the easy
/// regime, translated-exponential rejection in the far tail.
double truncnorm_sample(double mu, double sigma, RngEngine& rng);

/// Regularized incomplete beta function I_x(a, b) via continued fraction.
double reg_inc_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with nu degrees of freedom.
double student_t_two_sided_p(double t, double nu);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // divides by n-1
double median(std::vector<double> v);                  // by value: sorts a copy

}  // namespace odest
