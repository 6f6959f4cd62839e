#include "odest/layout.hpp"

#include <cmath>
#include <stdexcept>

#include "odest/simplex.hpp"

namespace odest {

OdParamLayout::OdParamLayout(std::size_t S, bool has_intercepts,
                             const std::optional<std::vector<std::uint8_t>>& structural_zeros)
    : S_(S), has_intercepts_(has_intercepts) {
    if (S < 2) throw std::invalid_argument("OdParamLayout: S must be >= 2");
    if (structural_zeros && structural_zeros->size() != S * S)
        throw std::invalid_argument("OdParamLayout: structural zero mask must be S*S");
    free_cols_.resize(S);
    row_offset_.resize(S);
    std::size_t off = 0;
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t j = 0; j < S; ++j) {
            if (j == i) continue;
            if (structural_zeros && (*structural_zeros)[i * S + j]) continue;
            free_cols_[i].push_back(j);
        }
        if (free_cols_[i].empty())
            throw std::invalid_argument("OdParamLayout: row " + std::to_string(i) +
                                        " has no feasible destination");
        row_offset_[i] = off;
        off += free_cols_[i].size() - 1;
    }
    sigma_offset_ = off;
    r_offset_ = off + S;
    dim_u_ = has_intercepts ? r_offset_ + S : sigma_offset_ + S;
}

std::vector<std::string> OdParamLayout::param_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < S_; ++i)
        for (std::size_t j = 0; j < S_; ++j) {
            if (j == i) continue;
            names.push_back("alpha." + std::to_string(i + 1) + "." + std::to_string(j + 1));
        }
    for (std::size_t j = 0; j < S_; ++j) names.push_back("sigma." + std::to_string(j + 1));
    if (has_intercepts_)
        for (std::size_t j = 0; j < S_; ++j) names.push_back("r." + std::to_string(j + 1));
    return names;
}

std::size_t OdParamLayout::dim_constrained() const {
    return S_ * (S_ - 1) + S_ + (has_intercepts_ ? S_ : 0);
}

void OdParamLayout::decode(const double* u, Mat& alpha, std::vector<double>& sigma,
                           std::vector<double>& r) const {
    if (alpha.rows() != S_ || alpha.cols() != S_) alpha = Mat(S_, S_);
    for (std::size_t i = 0; i < S_; ++i)
        for (std::size_t j = 0; j < S_; ++j) alpha(i, j) = 0.0;
    std::vector<double> x;
    for (std::size_t i = 0; i < S_; ++i) {
        const auto& cols = free_cols_[i];
        x.resize(cols.size());
        simplex_forward(u + row_offset_[i], cols.size(), x.data());
        for (std::size_t k = 0; k < cols.size(); ++k) alpha(i, cols[k]) = x[k];
    }
    sigma.resize(S_);
    for (std::size_t j = 0; j < S_; ++j) sigma[j] = std::exp(u[sigma_offset_ + j]);
    r.assign(S_, 0.0);
    if (has_intercepts_)
        for (std::size_t j = 0; j < S_; ++j) r[j] = u[r_offset_ + j];
}

std::vector<double> OdParamLayout::constrain(const std::vector<double>& u) const {
    if (u.size() != dim_u_) throw std::invalid_argument("constrain: wrong dimension");
    Mat alpha;
    std::vector<double> sigma, r;
    decode(u.data(), alpha, sigma, r);
    std::vector<double> c;
    c.reserve(dim_constrained());
    for (std::size_t i = 0; i < S_; ++i)
        for (std::size_t j = 0; j < S_; ++j)
            if (j != i) c.push_back(alpha(i, j));
    for (std::size_t j = 0; j < S_; ++j) c.push_back(sigma[j]);
    if (has_intercepts_)
        for (std::size_t j = 0; j < S_; ++j) c.push_back(r[j]);
    return c;
}

std::vector<double> OdParamLayout::unconstrain(const Mat& alpha, const std::vector<double>& sigma,
                                               const std::vector<double>& r) const {
    if (alpha.rows() != S_ || alpha.cols() != S_ || sigma.size() != S_)
        throw std::invalid_argument("unconstrain: shape mismatch");
    std::vector<double> u(dim_u_, 0.0);
    for (std::size_t i = 0; i < S_; ++i) {
        const auto& cols = free_cols_[i];
        std::vector<double> x(cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) x[k] = alpha(i, cols[k]);
        auto [y, lj] = simplex_inverse(x);
        for (std::size_t k = 0; k < y.size(); ++k) u[row_offset_[i] + k] = y[k];
    }
    for (std::size_t j = 0; j < S_; ++j) {
        if (!(sigma[j] > 0.0)) throw std::invalid_argument("unconstrain: sigma must be > 0");
        u[sigma_offset_ + j] = std::log(sigma[j]);
    }
    if (has_intercepts_) {
        if (r.size() != S_) throw std::invalid_argument("unconstrain: r size mismatch");
        for (std::size_t j = 0; j < S_; ++j) u[r_offset_ + j] = r[j];
    }
    return u;
}

}  // namespace odest
