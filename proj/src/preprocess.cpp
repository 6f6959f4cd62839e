#include "odest/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "odest/stats.hpp"

namespace odest {

MonotoneRationalQuadratic::MonotoneRationalQuadratic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("MonotoneRationalQuadratic: need >= 2 matching knots");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        if (!(h[k] > 0.0))
            throw std::invalid_argument("MonotoneRationalQuadratic: knots must increase");
        delta[k] = (y_[k + 1] - y_[k]) / h[k];
        if (delta[k] < 0.0)
            throw std::invalid_argument(
                "MonotoneRationalQuadratic: data not non-decreasing at index " +
                std::to_string(k + 1));
    }
    // Monotone-limited derivative estimates: Butland weighted harmonic mean
    // in the interior, one-sided secants at the ends.
    d_.assign(n, 0.0);
    d_[0] = delta[0];
    d_[n - 1] = delta[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double prod = delta[k - 1] * delta[k];
        if (prod > 0.0) {
            const double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
            d_[k] = prod / (a * delta[k] + (1.0 - a) * delta[k - 1]);
        }
    }
}

double MonotoneRationalQuadratic::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_[0]) return y_[0];
    if (x >= x_[n - 1]) return y_[n - 1];
    const std::size_t k =
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double delta = (y_[k + 1] - y_[k]) / h;
    if (delta == 0.0) return y_[k];  // flat segment
    const double t = (x - x_[k]) / h;
    const double num = delta * t * t + d_[k] * t * (1.0 - t);
    const double den = delta + (d_[k + 1] + d_[k] - 2.0 * delta) * t * (1.0 - t);
    return y_[k] + (y_[k + 1] - y_[k]) * num / den;
}

std::vector<double> upsample_counts(const std::vector<double>& timestamps,
                                    const std::vector<double>& cumulative_counts,
                                    double target_interval) {
    const std::size_t n = timestamps.size();
    if (n < 2 || cumulative_counts.size() != n)
        throw std::invalid_argument("upsample_counts: need >= 2 matching samples");
    if (!(target_interval > 0.0)) throw std::invalid_argument("upsample_counts: bad interval");
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (!(timestamps[k + 1] > timestamps[k]))
            throw std::invalid_argument("upsample_counts: timestamps not increasing at index " +
                                        std::to_string(k + 1));
        if (cumulative_counts[k + 1] < cumulative_counts[k])
            throw std::invalid_argument("upsample_counts: cumulative counts decrease at index " +
                                        std::to_string(k + 1));
        const double span = timestamps[k + 1] - timestamps[k];
        const double steps = span / target_interval;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            throw std::invalid_argument(
                "upsample_counts: target interval does not divide the recording interval at "
                "index " +
                std::to_string(k + 1));
    }

    MonotoneRationalQuadratic spline(timestamps, cumulative_counts);
    const auto total_steps = static_cast<std::size_t>(
        std::round((timestamps[n - 1] - timestamps[0]) / target_interval));
    std::vector<double> counts(total_steps);
    double prev = cumulative_counts[0];
    for (std::size_t k = 1; k <= total_steps; ++k) {
        const double t = timestamps[0] + static_cast<double>(k) * target_interval;
        const double cur = spline(t);
        counts[k - 1] = std::max(0.0, cur - prev);
        prev = cur;
    }
    return counts;
}

ObservationSet balance_counts(const ObservationSet& obs) {
    validate_observation_set(obs);
    ObservationSet out = obs;
    for (std::size_t n = 0; n < obs.N; ++n) {
        double xt = 0.0, yt = 0.0;
        for (std::size_t s = 0; s < obs.S; ++s) {
            xt += obs.X(n, s);
            yt += obs.Y(n, s);
        }
        const double excess = xt - yt;
        if (excess == 0.0) continue;  // balanced already
        if (excess > 0.0) {
            if (yt == 0.0)
                throw std::runtime_error("balance_counts: zero exit total in observation " +
                                         std::to_string(n));
            const double scale = xt / yt;
            for (std::size_t s = 0; s < obs.S; ++s) out.Y(n, s) = obs.Y(n, s) * scale;
        } else {
            if (xt == 0.0)
                throw std::runtime_error("balance_counts: zero entry total in observation " +
                                         std::to_string(n));
            const double scale = yt / xt;
            for (std::size_t s = 0; s < obs.S; ++s) out.X(n, s) = obs.X(n, s) * scale;
        }
    }
    return out;
}

ImputeResult impute_gaps(const std::vector<double>& series, std::size_t window_radius,
                         double outlier_z) {
    const std::size_t n = series.size();
    if (n == 0) throw std::invalid_argument("impute_gaps: empty series");
    if (window_radius == 0) throw std::invalid_argument("impute_gaps: zero window radius");

    std::vector<double> valid;
    for (double v : series)
        if (!std::isnan(v)) valid.push_back(v);
    if (valid.empty()) throw std::runtime_error("impute_gaps: gap spans the whole series");

    // Robust z-scores from the median absolute deviation.
    const double med = median(valid);
    std::vector<double> dev;
    for (double v : valid) dev.push_back(std::abs(v - med));
    const double mad = median(dev);

    std::vector<std::uint8_t> bad(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (std::isnan(series[t])) {
            bad[t] = 1;
            continue;
        }
        const double abs_dev = std::abs(series[t] - med);
        if (mad == 0.0) {
            if (abs_dev > 0.0 && outlier_z < std::numeric_limits<double>::infinity()) bad[t] = 1;
        } else if (0.6744897501960817 * abs_dev / mad > outlier_z) {
            bad[t] = 1;
        }
    }

    bool any_good = false;
    for (std::size_t t = 0; t < n; ++t)
        if (!bad[t]) any_good = true;
    if (!any_good) throw std::runtime_error("impute_gaps: no valid data left after screening");

    ImputeResult res;
    res.series = series;
    res.edited.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (!bad[t]) continue;
        std::size_t radius = window_radius;
        std::vector<double> neighbours;
        while (neighbours.empty()) {
            const std::size_t lo = t >= radius ? t - radius : 0;
            const std::size_t hi = std::min(n - 1, t + radius);
            for (std::size_t k = lo; k <= hi; ++k)
                if (!bad[k]) neighbours.push_back(series[k]);
            if (radius >= n) break;
            radius *= 2;
        }
        if (neighbours.empty()) throw std::runtime_error("impute_gaps: gap spans the whole series");
        res.series[t] = median(neighbours);
        res.edited[t] = 1;
    }
    return res;
}

}  // namespace odest
