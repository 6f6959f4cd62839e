#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "odest/preprocess.hpp"
#include "odest/rng.hpp"

using namespace odest;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TEST_CASE("linear cumulative data up-samples to a constant rate") {
    // 100 counts per 4-hour interval, 5-minute target: 100/48 each.
    std::vector<double> ts, cum;
    for (int k = 0; k <= 4; ++k) {
        ts.push_back(240.0 * k);
        cum.push_back(100.0 * k);
    }
    const auto counts = upsample_counts(ts, cum, 5.0);
    REQUIRE(counts.size() == 4 * 48);
    for (double c : counts) CHECK(c == doctest::Approx(100.0 / 48.0).epsilon(1e-9));
}

TEST_CASE("a zero-count interval stays exactly zero and non-negative") {
    const std::vector<double> ts = {0, 240, 480};
    const std::vector<double> cum = {0, 480, 480};
    const auto counts = upsample_counts(ts, cum, 5.0);
    REQUIRE(counts.size() == 96);
    for (std::size_t k = 0; k < 96; ++k) {
        CHECK(counts[k] >= 0.0);
        if (k >= 48) CHECK(counts[k] == 0.0);
    }
    double first = 0.0;
    for (std::size_t k = 0; k < 48; ++k) first += counts[k];
    CHECK(first == doctest::Approx(480.0).epsilon(1e-12));
}

TEST_CASE("random monotone series conserve interval totals to 1e-9") {
    auto rng = make_rng(12);
    std::uniform_real_distribution<double> unif(0.0, 800.0);
    std::vector<double> ts{0.0}, cum{0.0};
    for (int k = 1; k <= 12; ++k) {
        ts.push_back(240.0 * k);
        cum.push_back(cum.back() + unif(rng));
    }
    const auto counts = upsample_counts(ts, cum, 5.0);
    for (int interval = 0; interval < 12; ++interval) {
        double total = 0.0;
        for (int k = 0; k < 48; ++k) total += counts[interval * 48 + k];
        CHECK(std::abs(total - (cum[interval + 1] - cum[interval])) < 1e-9);
    }
}

TEST_CASE("non-monotone cumulative input is rejected with its index") {
    CHECK_THROWS_WITH_AS(upsample_counts({0, 240, 480}, {0, 100, 90}, 5.0),
                         doctest::Contains("index 2"), std::invalid_argument);
}

TEST_CASE("balance scales the deficient side by the total ratio") {
    ObservationSet obs;
    obs.S = 2;
    obs.N = 1;
    obs.X = Mat::from_rows({{60, 40}});
    obs.Y = Mat::from_rows({{30, 50}});
    const auto out = balance_counts(obs);
    CHECK(out.X(0, 0) == 60.0);  // larger side untouched
    CHECK(out.X(0, 1) == 40.0);
    CHECK(out.Y(0, 0) == doctest::Approx(37.5).epsilon(1e-14));
    CHECK(out.Y(0, 1) == doctest::Approx(62.5).epsilon(1e-14));
}

TEST_CASE("already balanced observations are untouched") {
    ObservationSet obs;
    obs.S = 2;
    obs.N = 2;
    obs.X = Mat::from_rows({{10, 20}, {5, 5}});
    obs.Y = Mat::from_rows({{25, 5}, {2, 8}});
    const auto out = balance_counts(obs);
    CHECK(out.X == obs.X);
    CHECK(out.Y == obs.Y);
}

TEST_CASE("balance equalizes totals, preserves shares, and is idempotent") {
    auto rng = make_rng(31);
    std::uniform_real_distribution<double> unif(1.0, 120.0);
    ObservationSet obs;
    obs.S = 5;
    obs.N = 10;
    obs.X = Mat(10, 5);
    obs.Y = Mat(10, 5);
    for (std::size_t n = 0; n < 10; ++n)
        for (std::size_t s = 0; s < 5; ++s) {
            obs.X(n, s) = unif(rng);
            obs.Y(n, s) = unif(rng);
        }
    const auto once = balance_counts(obs);
    for (std::size_t n = 0; n < 10; ++n) {
        double xt = 0, yt = 0;
        for (std::size_t s = 0; s < 5; ++s) {
            xt += once.X(n, s);
            yt += once.Y(n, s);
        }
        CHECK(std::abs(xt - yt) < 1e-9 * std::max(xt, yt));
        // Relative shares preserved on both sides.
        for (std::size_t s = 0; s < 4; ++s) {
            CHECK(once.X(n, s) / once.X(n, s + 1) ==
                  doctest::Approx(obs.X(n, s) / obs.X(n, s + 1)).epsilon(1e-12));
            CHECK(once.Y(n, s) / once.Y(n, s + 1) ==
                  doctest::Approx(obs.Y(n, s) / obs.Y(n, s + 1)).epsilon(1e-12));
        }
    }
    const auto twice = balance_counts(once);
    for (std::size_t n = 0; n < 10; ++n)
        for (std::size_t s = 0; s < 5; ++s) {
            CHECK(twice.X(n, s) == doctest::Approx(once.X(n, s)).epsilon(1e-12));
            CHECK(twice.Y(n, s) == doctest::Approx(once.Y(n, s)).epsilon(1e-12));
        }
}

TEST_CASE("balance fails when the scaled side has zero total") {
    ObservationSet obs;
    obs.S = 2;
    obs.N = 1;
    obs.X = Mat::from_rows({{10, 5}});
    obs.Y = Mat::from_rows({{0, 0}});
    CHECK_THROWS_AS(balance_counts(obs), std::runtime_error);
}

TEST_CASE("impute: clean series is the identity with an empty mask") {
    const std::vector<double> series = {3, 4, 5, 4, 3, 4};
    const auto res = impute_gaps(series, 2, 5.0);
    CHECK(res.series == series);
    for (auto e : res.edited) CHECK(e == 0);
}

TEST_CASE("impute: single missing value amid constants") {
    const std::vector<double> series = {7, 7, kNaN, 7, 7};
    const auto res = impute_gaps(series, 2, 5.0);
    CHECK(res.series[2] == 7.0);
    CHECK(res.edited[2] == 1);
    CHECK(res.edited[0] == 0);
}

TEST_CASE("impute: hundredfold spike in a constant series is replaced") {
    // MAD is zero here, so any deviation has infinite robust z-score; the
    // spike is replaced by the surrounding constant.
    std::vector<double> series(21, 10.0);
    series[10] = 1000.0;
    const auto res = impute_gaps(series, 3, 5.0);
    CHECK(res.edited[10] == 1);
    CHECK(res.series[10] == 10.0);
    std::size_t edits = 0;
    for (auto e : res.edited) edits += e;
    CHECK(edits == 1);
}

TEST_CASE("impute: robust z-score with positive MAD spares mild wobble") {
    // Alternating wobble gives MAD = 1; a z threshold of 5 tolerates it but
    // catches the far point (robust z of 60 about 0.6745 * 50 / 1 ~ 34).
    std::vector<double> series;
    for (int k = 0; k < 24; ++k) series.push_back(10.0 + (k % 2 ? 1.0 : -1.0));
    series[12] = 60.0;
    const auto res = impute_gaps(series, 3, 5.0);
    CHECK(res.edited[12] == 1);
    std::size_t edits = 0;
    for (auto e : res.edited) edits += e;
    CHECK(edits == 1);
}

TEST_CASE("impute fails when everything is missing") {
    const std::vector<double> series = {kNaN, kNaN, kNaN};
    CHECK_THROWS_AS(impute_gaps(series, 1, 5.0), std::runtime_error);
}

TEST_CASE("wide gaps borrow from beyond the window radius") {
    std::vector<double> series(9, kNaN);
    series[0] = 4.0;
    series[8] = 6.0;
    const auto res = impute_gaps(series, 1, 5.0);
    for (double v : res.series) {
        CHECK(v >= 4.0);
        CHECK(v <= 6.0);
    }
}
