#include "odest/types.hpp"

#include <cmath>
#include <stdexcept>

namespace odest {

std::optional<OdViolation> validate_od_matrix(const ODMatrix& m, double sum_tol) {
    if (m.S < 2) throw std::invalid_argument("validate_od_matrix: S must be >= 2");
    if (m.alpha.rows() != m.S || m.alpha.cols() != m.S)
        throw std::invalid_argument("validate_od_matrix: alpha must be S x S");

    for (std::size_t i = 0; i < m.S; ++i) {
        if (m.alpha(i, i) != 0.0)
            return OdViolation{i, "diagonal", std::abs(m.alpha(i, i))};
        for (std::size_t j = 0; j < m.S; ++j) {
            const double a = m.alpha(i, j);
            if (!(a >= 0.0) || !std::isfinite(a))
                return OdViolation{i, "non-negative", a};
            if (m.zero_at(i, j) && a != 0.0)
                return OdViolation{i, "structural-zero", a};
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < m.S; ++j) sum += m.alpha(i, j);
        if (std::abs(sum - 1.0) > sum_tol)
            return OdViolation{i, "sum-to-one", std::abs(sum - 1.0)};
    }
    return std::nullopt;
}

void validate_observation_set(const ObservationSet& obs) {
    if (obs.N < 1 || obs.S < 1) throw std::invalid_argument("ObservationSet: empty");
    if (obs.X.rows() != obs.N || obs.X.cols() != obs.S || obs.Y.rows() != obs.N ||
        obs.Y.cols() != obs.S)
        throw std::invalid_argument("ObservationSet: X and Y must both be N x S");
    for (std::size_t n = 0; n < obs.N; ++n)
        for (std::size_t s = 0; s < obs.S; ++s) {
            if (!(obs.X(n, s) >= 0.0) || !(obs.Y(n, s) >= 0.0))
                throw std::invalid_argument("ObservationSet: negative or NaN count");
        }
}

void validate_binned_observation_set(const BinnedObservationSet& b) {
    if (b.N < 1 || b.S < 1 || b.T < 1) throw std::invalid_argument("BinnedObservationSet: empty");
    if (b.t1 < b.t0) throw std::invalid_argument("BinnedObservationSet: t1 < t0");
    if (b.T_a != b.T - static_cast<std::size_t>(b.t1 - b.t0))
        throw std::invalid_argument("BinnedObservationSet: T_a != T - (t1 - t0)");
    if (b.Xb.size() != b.N || b.Yb.size() != b.N)
        throw std::invalid_argument("BinnedObservationSet: need N tensors");
    for (std::size_t n = 0; n < b.N; ++n) {
        if (b.Xb[n].rows() != b.T || b.Xb[n].cols() != b.S)
            throw std::invalid_argument("BinnedObservationSet: Xb shape");
        if (b.Yb[n].rows() != b.T_a || b.Yb[n].cols() != b.S)
            throw std::invalid_argument("BinnedObservationSet: Yb shape");
        for (std::size_t t = 0; t < b.T; ++t)
            for (std::size_t s = 0; s < b.S; ++s)
                if (!(b.Xb[n](t, s) >= 0.0))
                    throw std::invalid_argument("BinnedObservationSet: negative entry count");
        for (std::size_t t = 0; t < b.T_a; ++t)
            for (std::size_t s = 0; s < b.S; ++s)
                if (!(b.Yb[n](t, s) >= 0.0))
                    throw std::invalid_argument("BinnedObservationSet: negative exit count");
    }
}

std::size_t PosteriorDraws::param_index(const std::string& name) const {
    for (std::size_t p = 0; p < param_names.size(); ++p)
        if (param_names[p] == name) return p;
    return static_cast<std::size_t>(-1);
}

ObservationSet aggregate_bins(const BinnedObservationSet& b) {
    validate_binned_observation_set(b);
    ObservationSet obs;
    obs.S = b.S;
    obs.N = b.N;
    obs.station_labels = b.station_labels;
    obs.X = Mat(b.N, b.S);
    obs.Y = Mat(b.N, b.S);
    for (std::size_t n = 0; n < b.N; ++n) {
        for (std::size_t t = 0; t < b.T; ++t)
            for (std::size_t s = 0; s < b.S; ++s) obs.X(n, s) += b.Xb[n](t, s);
        for (std::size_t t = 0; t < b.T_a; ++t)
            for (std::size_t s = 0; s < b.S; ++s) obs.Y(n, s) += b.Yb[n](t, s);
    }
    return obs;
}

}  // namespace odest
