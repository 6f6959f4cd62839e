#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "odest/netgen_a.hpp"
#include "odest/stats.hpp"

using namespace odest;

TEST_CASE("S = 2 rows are forced to the permutation") {
    for (std::uint64_t seed : {1, 7, 99}) {
        const auto m = sample_od_matrix_a(2, seed);
        CHECK(m.alpha(0, 1) == 1.0);
        CHECK(m.alpha(1, 0) == 1.0);
        CHECK(m.alpha(0, 0) == 0.0);
        CHECK(m.alpha(1, 1) == 0.0);
    }
}

TEST_CASE("all rows sum to one within 1e-12 at S = 15") {
    const auto m = sample_od_matrix_a(15, 4);
    CHECK_FALSE(validate_od_matrix(m).has_value());
    for (std::size_t i = 0; i < 15; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 15; ++j) sum += m.alpha(i, j);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("symmetric Dirichlet rows have mean 1/(S-1) per free coordinate") {
    // 1e5 independently seeded matrices at S = 5; the off-diagonal mean per
    // coordinate converges to 0.25.
    const std::size_t S = 5, reps = 100000;
    std::vector<double> sums(S * S, 0.0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto m = sample_od_matrix_a(S, 1000 + rep);
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t j = 0; j < S; ++j) sums[i * S + j] += m.alpha(i, j);
    }
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            if (i == j) continue;
            CHECK(std::abs(sums[i * S + j] / reps - 0.25) < 0.01);
        }
}

TEST_CASE("negative binomial draws match the target mean and variance") {
    auto rng = make_rng(5);
    const std::size_t n = 1000000;

    SUBCASE("overdispersed: mu 600 phi 10") {
        std::vector<double> draws(n);
        for (auto& d : draws) d = static_cast<double>(sample_negbin(600, 10, rng));
        CHECK(mean(draws) == doctest::Approx(600.0).epsilon(0.02));
        CHECK(sample_variance(draws) == doctest::Approx(36600.0).epsilon(0.05));
    }
    SUBCASE("equidispersed limit: huge phi") {
        std::vector<double> draws(n / 10);
        for (auto& d : draws) d = static_cast<double>(sample_negbin(50, 1e9, rng));
        CHECK(sample_variance(draws) == doctest::Approx(50.0).epsilon(0.05));
    }
    SUBCASE("mu 10 phi 10 has variance 20") {
        std::vector<double> draws(n);
        for (auto& d : draws) d = static_cast<double>(sample_negbin(10, 10, rng));
        CHECK(sample_variance(draws) == doctest::Approx(20.0).epsilon(0.05));
    }
}

TEST_CASE("S = 2 exits are exactly the swapped entries") {
    GenAConfig cfg;
    cfg.S = 2;
    cfg.N = 10;
    cfg.mu_x = {40, 70};
    cfg.phi = 10;
    cfg.seed = 3;
    const auto [truth, obs] = generate_network_a(cfg);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        CHECK(obs.Y(n, 0) == obs.X(n, 1));
        CHECK(obs.Y(n, 1) == obs.X(n, 0));
    }
}

TEST_CASE("per-observation mass balance is exact on the default network") {
    const auto cfg = default_gen_a_config();
    REQUIRE(cfg.mu_x.size() == 15);
    CHECK(cfg.mu_x[2] == 1400);
    CHECK(cfg.mu_x[10] == 200);
    const auto [truth, obs] = generate_network_a(cfg);
    CHECK(obs.N == 30);
    for (std::size_t n = 0; n < obs.N; ++n) {
        double xt = 0.0, yt = 0.0;
        for (std::size_t s = 0; s < obs.S; ++s) {
            xt += obs.X(n, s);
            yt += obs.Y(n, s);
        }
        CHECK(xt == yt);  // integer bookkeeping, bitwise equal
    }
}

TEST_CASE("generation is bit-reproducible under a fixed seed") {
    const auto cfg = default_gen_a_config();
    const auto a = generate_network_a(cfg);
    const auto b = generate_network_a(cfg);
    CHECK(a.first.alpha == b.first.alpha);
    CHECK(a.second.X == b.second.X);
    CHECK(a.second.Y == b.second.Y);
}

TEST_CASE("empirical split fractions converge to the OD matrix") {
    GenAConfig cfg;
    cfg.S = 3;
    cfg.N = 1000;
    cfg.mu_x = {500, 700, 900};
    cfg.phi = 50;
    cfg.seed = 17;
    const auto [truth, obs] = generate_network_a(cfg);
    // Column means of Y approach the column means of X A.
    for (std::size_t j = 0; j < 3; ++j) {
        double y_mean = 0.0, pred_mean = 0.0;
        for (std::size_t n = 0; n < cfg.N; ++n) {
            y_mean += obs.Y(n, j);
            for (std::size_t i = 0; i < 3; ++i) pred_mean += obs.X(n, i) * truth.alpha(i, j);
        }
        CHECK(y_mean / pred_mean == doctest::Approx(1.0).epsilon(0.02));
    }
}
