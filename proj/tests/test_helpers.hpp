#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "odest/rng.hpp"
#include "odest/types.hpp"

namespace odest::testing {

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> u, double h = 1e-5) {
    std::vector<double> g(u.size());
    for (std::size_t d = 0; d < u.size(); ++d) {
        const double orig = u[d];
        u[d] = orig + h;
        const double fp = f(u);
        u[d] = orig - h;
        const double fm = f(u);
        u[d] = orig;
        g[d] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Infinity-norm relative disagreement between two gradient vectors.
inline double grad_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        diff = std::max(diff, std::abs(a[d] - b[d]));
        scale = std::max({scale, std::abs(a[d]), std::abs(b[d])});
    }
    return diff / std::max(scale, 1.0);
}

inline ObservationSet random_observations(std::size_t S, std::size_t N, std::uint64_t seed,
                                          double lo = 1.0, double hi = 30.0) {
    auto rng = make_rng(seed, 0x7e57ULL);
    std::uniform_real_distribution<double> unif(lo, hi);
    ObservationSet obs;
    obs.S = S;
    obs.N = N;
    obs.X = Mat(N, S);
    obs.Y = Mat(N, S);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t s = 0; s < S; ++s) {
            obs.X(n, s) = unif(rng);
            obs.Y(n, s) = unif(rng);
        }
    for (std::size_t s = 0; s < S; ++s) obs.station_labels.push_back("s" + std::to_string(s + 1));
    return obs;
}

inline std::vector<double> random_point(std::size_t dim, std::uint64_t seed, double lo = -1.0,
                                        double hi = 1.0) {
    auto rng = make_rng(seed, 0x901277ULL);
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> u(dim);
    for (auto& v : u) v = unif(rng);
    return u;
}

}  // namespace odest::testing
