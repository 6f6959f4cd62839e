#include "odest/od_point.hpp"

#include <cmath>

namespace odest {

void decode_od_point(const OdParamLayout& layout, const double* u, OdDecoded& out) {
    const std::size_t S = layout.S();
    if (out.alpha.rows() != S || out.alpha.cols() != S) out.alpha = Mat(S, S);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) out.alpha(i, j) = 0.0;
    out.work.resize(S);
    out.log_jac_rows = 0.0;
    std::vector<double> x;
    for (std::size_t i = 0; i < S; ++i) {
        const auto& cols = layout.free_cols(i);
        x.resize(cols.size());
        out.log_jac_rows += simplex_forward(u + layout.row_offset(i), cols.size(), x.data(),
                                            &out.work[i]);
        for (std::size_t k = 0; k < cols.size(); ++k) out.alpha(i, cols[k]) = x[k];
    }
    out.sigma.resize(S);
    for (std::size_t j = 0; j < S; ++j) out.sigma[j] = std::exp(u[layout.sigma_offset() + j]);
    out.r.assign(S, 0.0);
    if (layout.has_intercepts())
        for (std::size_t j = 0; j < S; ++j) out.r[j] = u[layout.r_offset() + j];
}

double dirichlet_log_prior(const OdParamLayout& layout, const OdDecoded& d, double c) {
    if (c == 1.0) return 0.0;
    double lp = 0.0;
    for (std::size_t i = 0; i < layout.S(); ++i)
        for (std::size_t j : layout.free_cols(i)) lp += (c - 1.0) * std::log(d.alpha(i, j));
    return lp;
}

double od_transform_log_jacobian(const OdParamLayout& layout, const OdDecoded& d) {
    double lj = d.log_jac_rows;
    for (std::size_t j = 0; j < layout.S(); ++j) lj += std::log(d.sigma[j]);
    return lj;
}

void od_chain_rule(const OdParamLayout& layout, const OdDecoded& d, double dirichlet_c,
                   const Mat& grad_alpha_t, const std::vector<double>& grad_sigma,
                   const std::vector<double>& grad_r, double* grad_u) {
    const std::size_t S = layout.S();
    std::vector<double> gx;
    for (std::size_t i = 0; i < S; ++i) {
        const auto& cols = layout.free_cols(i);
        gx.resize(cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) {
            gx[k] = grad_alpha_t(cols[k], i);
            if (dirichlet_c != 1.0) gx[k] += (dirichlet_c - 1.0) / d.alpha(i, cols[k]);
        }
        simplex_backprop(d.work[i], gx.data(), cols.size(), grad_u + layout.row_offset(i),
                         /*with_logjac=*/true);
    }
    for (std::size_t j = 0; j < S; ++j)
        grad_u[layout.sigma_offset() + j] = d.sigma[j] * grad_sigma[j] + 1.0;
    if (layout.has_intercepts())
        for (std::size_t j = 0; j < S; ++j) grad_u[layout.r_offset() + j] = grad_r[j];
}

}  // namespace odest
