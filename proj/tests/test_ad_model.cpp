#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "odest/ad_model.hpp"
#include "odest/ib_model.hpp"
#include "odest/stats.hpp"
#include "test_helpers.hpp"

using namespace odest;
using namespace odest::testing;

namespace {

BinnedObservationSet random_binned(std::size_t S, std::size_t N, std::size_t T, int gap,
                                   std::uint64_t seed) {
    auto rng = make_rng(seed, 0xbbbULL);
    std::uniform_real_distribution<double> unif(0.5, 25.0);
    BinnedObservationSet b;
    b.S = S;
    b.N = N;
    b.T = T;
    b.T_a = T - static_cast<std::size_t>(gap);
    b.bin_width_minutes = 5;
    b.t0 = 1;
    b.t1 = 1 + gap;
    b.Xb.assign(N, Mat(T, S));
    b.Yb.assign(N, Mat(b.T_a, S));
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t s = 0; s < S; ++s) b.Xb[n](t, s) = unif(rng);
        for (std::size_t t = 0; t < b.T_a; ++t)
            for (std::size_t s = 0; s < S; ++s) b.Yb[n](t, s) = unif(rng);
    }
    for (std::size_t s = 0; s < S; ++s) b.station_labels.push_back("s" + std::to_string(s + 1));
    return b;
}

TravelTimeTable delays_for(std::size_t S, int max_delay, std::uint64_t seed) {
    auto rng = make_rng(seed, 0xdddULL);
    std::uniform_int_distribution<int> d(0, max_delay);
    TravelTimeTable t;
    t.S = S;
    t.delays.assign(S * S, 0);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j)
            if (i != j) t.at(i, j) = d(rng);
    return t;
}

}  // namespace

TEST_CASE("assignment row index follows the (j, n, t_a) stacking") {
    CHECK(assignment_row_index(2, 3, 4, 5, 10) == 74);
    CHECK(assignment_row_index(1, 1, 1, 5, 10) == 1);
}

TEST_CASE("zero delays with t1 == t0 reproduce the concurrent entry bins") {
    auto b = random_binned(3, 2, 4, 0, 1);
    TravelTimeTable zero;
    zero.S = 3;
    zero.delays.assign(9, 0);
    const auto model = build_assignment(b, zero);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t n = 0; n < 2; ++n)
            for (std::size_t ta = 0; ta < 4; ++ta)
                for (std::size_t i = 0; i < 3; ++i) {
                    const double expect = i == j ? 0.0 : b.Xb[n](ta, i);
                    CHECK(model.H[j](n * 4 + ta, i) == expect);
                }
}

TEST_CASE("hand-enumerated two-station assignment with one-bin delay") {
    // S=2, N=1, T=3, gap 1 (T_a=2), delay 1 everywhere: t_d = t_a.
    auto b = random_binned(2, 1, 3, 1, 2);
    TravelTimeTable one;
    one.S = 2;
    one.delays.assign(4, 1);
    const auto model = build_assignment(b, one);
    for (std::size_t ta = 1; ta <= 2; ++ta) {
        CHECK(model.H[0](ta - 1, 1) == b.Xb[0](ta - 1, 1));
        CHECK(model.H[1](ta - 1, 0) == b.Xb[0](ta - 1, 0));
    }
}

TEST_CASE("delays exceeding the window gap are rejected with the pair") {
    auto b = random_binned(2, 1, 4, 1, 3);
    TravelTimeTable too_big;
    too_big.S = 2;
    too_big.delays.assign(4, 2);  // gap is 1
    CHECK_THROWS_WITH_AS(build_assignment(b, too_big),
                         doctest::Contains("pair (2,1)"), std::invalid_argument);
}

TEST_CASE("row bookkeeping round-trips over all (j, n, t_a)") {
    const std::size_t N = 3, T_a = 4, S = 2;
    std::vector<char> hit(S * N * T_a, 0);
    for (std::size_t j = 1; j <= S; ++j)
        for (std::size_t n = 1; n <= N; ++n)
            for (std::size_t ta = 1; ta <= T_a; ++ta) {
                const std::size_t k = assignment_row_index(j, n, ta, N, T_a);
                REQUIRE(k >= 1);
                REQUIRE(k <= S * N * T_a);
                CHECK(hit[k - 1] == 0);
                hit[k - 1] = 1;
                // invert
                const std::size_t j_back = (k - 1) / (N * T_a) + 1;
                const std::size_t n_back = ((k - 1) % (N * T_a)) / T_a + 1;
                const std::size_t ta_back = (k - 1) % T_a + 1;
                CHECK(j_back == j);
                CHECK(n_back == n);
                CHECK(ta_back == ta);
            }
}

TEST_CASE("log posterior matches the naive serial oracle") {
    const auto model = build_assignment(random_binned(4, 3, 6, 2, 3), delays_for(4, 2, 3));
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto u = random_point(model.layout.dim_unconstrained(), 400 + k, -1.0, 1.0);
        std::vector<double> g1, g2;
        const double lp1 = ad_log_posterior_grad(model, u, g1);
        const double lp2 = ad_log_posterior_grad_serial(model, u, g2);
        CHECK(lp1 == doctest::Approx(lp2).epsilon(1e-12));
        CHECK(ad_log_posterior(model, u) == doctest::Approx(lp2).epsilon(1e-12));
        CHECK(grad_rel_error(g1, g2) < 1e-12);
    }
}

TEST_CASE("analytic gradient matches central differences") {
    const auto model = build_assignment(random_binned(4, 5, 6, 2, 7), delays_for(4, 2, 9));
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto u = random_point(model.layout.dim_unconstrained(), 500 + k, -1.2, 1.2);
        std::vector<double> grad;
        ad_log_posterior_grad(model, u, grad);
        const auto fd = fd_gradient(
            [&](const std::vector<double>& v) { return ad_log_posterior(model, v); }, u);
        CHECK(grad_rel_error(grad, fd) < 1e-6);
    }
}

TEST_CASE("zero-delay posterior equals the per-bin instantaneous model at r = 0") {
    const std::size_t S = 3, N = 2, T = 4;
    auto b = random_binned(S, N, T, 0, 11);
    TravelTimeTable zero;
    zero.S = S;
    zero.delays.assign(S * S, 0);
    const auto ad = build_assignment(b, zero);

    // Per-bin observations: every (n, t) becomes one instantaneous row.
    ObservationSet obs;
    obs.S = S;
    obs.N = N * T;
    obs.X = Mat(N * T, S);
    obs.Y = Mat(N * T, S);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t s = 0; s < S; ++s) {
                obs.X(n * T + t, s) = b.Xb[n](t, s);
                obs.Y(n * T + t, s) = b.Yb[n](t, s);
            }
    const auto ib = make_ib_model(std::move(obs), /*regularized=*/false);

    const auto u_ad = random_point(ad.layout.dim_unconstrained(), 77, -0.9, 0.9);
    // Same point with intercepts clamped to zero.
    std::vector<double> u_ib(ib.layout.dim_unconstrained(), 0.0);
    for (std::size_t d = 0; d < u_ad.size(); ++d) u_ib[d] = u_ad[d];

    CHECK(ad_log_posterior(ad, u_ad) ==
          doctest::Approx(ib_log_posterior(ib, u_ib)).epsilon(1e-10));

    std::vector<double> g_ad, g_ib;
    ad_log_posterior_grad(ad, u_ad, g_ad);
    ib_log_posterior_grad(ib, u_ib, g_ib);
    for (std::size_t d = 0; d < g_ad.size(); ++d)
        CHECK(g_ad[d] == doctest::Approx(g_ib[d]).epsilon(1e-9));
}

TEST_CASE("gradient for a destination with all-zero columns is prior-only") {
    const std::size_t S = 3, N = 2, T = 3;
    auto b = random_binned(S, N, T, 1, 13);
    // Destination 2's evidence and entries zeroed: its sigma sees only the
    // transform terms.
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t t = 0; t < b.T_a; ++t) b.Yb[n](t, 2) = 0.0;
    TravelTimeTable d = delays_for(S, 1, 17);
    auto model = build_assignment(b, d);
    for (std::size_t row = 0; row < model.rows_per_destination(); ++row)
        for (std::size_t i = 0; i < S; ++i) model.H[2](row, i) = 0.0;

    const auto u = random_point(model.layout.dim_unconstrained(), 19, -0.5, 0.5);
    std::vector<double> grad;
    ad_log_posterior_grad(model, u, grad);
    std::vector<double> fd = fd_gradient(
        [&](const std::vector<double>& v) { return ad_log_posterior(model, v); }, u);
    CHECK(grad_rel_error(grad, fd) < 1e-6);
    // With mu == 0 and y == 0 at destination 2 every likelihood row there
    // contributes d/d(log sigma) = -1; only the flat-prior Jacobian (+1)
    // remains on top.
    const auto rows = static_cast<double>(model.rows_per_destination());
    CHECK(grad[model.layout.sigma_offset() + 2] == doctest::Approx(1.0 - rows).epsilon(1e-9));
}
