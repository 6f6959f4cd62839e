#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odest/mat.hpp"
#include "odest/types.hpp"

namespace odest {

/// Maps between the samplers' flat unconstrained vector and the constrained
/// model parameters (OD rows as simplexes, positive scales, raw intercepts).
///
/// Unconstrained layout: per-row stick-breaking coordinates (K_i - 1 for a
/// row with K_i free destinations), then S log-scales, then S intercepts when
/// the model has them. Structural zeros reduce the row simplex dimension;
/// the excluded coefficients are pinned to zero on the constrained side.
class OdParamLayout {
  public:
    OdParamLayout() = default;
    OdParamLayout(std::size_t S, bool has_intercepts,
                  const std::optional<std::vector<std::uint8_t>>& structural_zeros);

    std::size_t S() const { return S_; }
    bool has_intercepts() const { return has_intercepts_; }
    const std::vector<std::size_t>& free_cols(std::size_t i) const { return free_cols_[i]; }
    std::size_t row_offset(std::size_t i) const { return row_offset_[i]; }

    std::size_t dim_unconstrained() const { return dim_u_; }
    std::size_t sigma_offset() const { return sigma_offset_; }
    std::size_t r_offset() const { return r_offset_; }

    /// Names of the constrained coordinates: alpha.i.j for every off-diagonal
    /// pair (1-based, row-major), then sigma.j, then r.j.
    std::vector<std::string> param_names() const;
    std::size_t dim_constrained() const;

    /// Decodes an unconstrained vector into a full S x S alpha matrix (zeros
    /// on the diagonal and structural-zero cells), sigma, and r.
    void decode(const double* u, Mat& alpha, std::vector<double>& sigma,
                std::vector<double>& r) const;

    /// Flattens decoded parameters in param_names() order.
    std::vector<double> constrain(const std::vector<double>& u) const;

    /// Inverse of decode; throws if alpha is not interior on its free cells.
    std::vector<double> unconstrain(const Mat& alpha, const std::vector<double>& sigma,
                                    const std::vector<double>& r) const;

  private:
    std::size_t S_ = 0;
    bool has_intercepts_ = false;
    std::vector<std::vector<std::size_t>> free_cols_;
    std::vector<std::size_t> row_offset_;  // offset of each row's sticks in u
    std::size_t sigma_offset_ = 0;
    std::size_t r_offset_ = 0;
    std::size_t dim_u_ = 0;
};

}  // namespace odest
