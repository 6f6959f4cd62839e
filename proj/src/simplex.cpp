#include "odest/simplex.hpp"

#include <cmath>
#include <stdexcept>

#include "odest/stats.hpp"

namespace odest {

double simplex_forward(const double* y, std::size_t K, double* x, StickBreakWork* work) {
    if (K == 0) throw std::invalid_argument("simplex_forward: K must be >= 1");
    if (work) {
        work->z.resize(K - 1);
        work->zc.resize(K - 1);
        work->stick.resize(K);
    }
    double stick = 1.0;
    double log_jac = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double adj = y[k] - std::log(static_cast<double>(K - 1 - k));
        const double z = logistic(adj);
        const double zc = logistic(-adj);  // 1-z without cancellation
        x[k] = stick * z;
        log_jac += std::log(stick) - log1p_exp(-adj) - log1p_exp(adj);
        if (work) {
            work->z[k] = z;
            work->zc[k] = zc;
            work->stick[k] = stick;
        }
        stick *= zc;
    }
    x[K - 1] = stick;
    if (work) work->stick[K - 1] = stick;
    return log_jac;
}

std::vector<double> simplex_forward(const std::vector<double>& y) {
    std::vector<double> x(y.size() + 1);
    simplex_forward(y.data(), x.size(), x.data());
    return x;
}

std::pair<std::vector<double>, double> simplex_inverse(const std::vector<double>& x) {
    const std::size_t K = x.size();
    if (K == 0) throw std::invalid_argument("simplex_inverse: empty input");
    std::vector<double> y(K - 1);
    double stick = 1.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        if (!(x[k] > 0.0) || !(x[k] < stick))
            throw std::domain_error("simplex_inverse: point not strictly interior");
        const double z = x[k] / stick;
        y[k] = std::log(z / (1.0 - z)) + std::log(static_cast<double>(K - 1 - k));
        stick -= x[k];
    }
    if (!(x[K - 1] > 0.0))
        throw std::domain_error("simplex_inverse: point not strictly interior");
    std::vector<double> xx(K);
    const double log_jac = simplex_forward(y.data(), K, xx.data());
    return {std::move(y), log_jac};
}

void simplex_backprop(const StickBreakWork& work, const double* grad_x, std::size_t K,
                      double* grad_y, bool with_logjac) {
    if (K == 1) return;
    // d/d stick_{K-1} collects everything downstream of the last stick.
    double g_stick = grad_x[K - 1];
    for (std::size_t k = K - 1; k-- > 0;) {
        const double z = work.z[k];
        const double zc = work.zc[k];
        const double stick = work.stick[k];
        double d_z = (grad_x[k] - g_stick) * stick;
        if (with_logjac) d_z += 1.0 / z - 1.0 / zc;
        grad_y[k] += d_z * z * zc;  // logistic derivative
        double d_stick = grad_x[k] * z + g_stick * zc;
        if (with_logjac) d_stick += 1.0 / stick;
        g_stick = d_stick;
    }
}

}  // namespace odest
