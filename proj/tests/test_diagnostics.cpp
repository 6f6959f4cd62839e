#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "odest/diagnostics.hpp"
#include "odest/mat.hpp"
#include "odest/rng.hpp"
#include "odest/stats.hpp"

using namespace odest;

namespace {

ODMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    ODMatrix m;
    m.S = rows.size();
    m.alpha = Mat::from_rows(rows);
    return m;
}

PosteriorDraws od_draws(std::size_t S, std::size_t chains, std::size_t per_chain,
                        const std::function<double(std::size_t, std::size_t, std::size_t)>& f) {
    // f(chain, draw, alpha_index) fills the off-diagonal coefficients.
    PosteriorDraws d;
    d.chains = chains;
    d.draws_per_chain = per_chain;
    const std::size_t n_alpha = S * (S - 1);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j)
            if (i != j)
                d.param_names.push_back("alpha." + std::to_string(i + 1) + "." +
                                        std::to_string(j + 1));
    for (std::size_t c = 0; c < chains; ++c) {
        Mat v(per_chain, n_alpha);
        for (std::size_t k = 0; k < per_chain; ++k)
            for (std::size_t p = 0; p < n_alpha; ++p) v(k, p) = f(c, k, p);
        d.values.push_back(std::move(v));
        d.divergent.emplace_back(per_chain, 0);
        d.tree_depth.emplace_back(per_chain, 3);
        d.step_size.push_back(0.5);
    }
    return d;
}

}  // namespace

TEST_CASE("mse is zero at equality and matches hand arithmetic") {
    const auto truth = matrix_from({{0, 1}, {1, 0}});
    CHECK(mse_vs_truth(truth.alpha, truth) == 0.0);
    const Mat est = Mat::from_rows({{0, 1}, {0.9, 0.1}});
    CHECK(mse_vs_truth(est, truth) == doctest::Approx(0.005).epsilon(1e-14));
}

TEST_CASE("mse matches a loop oracle on random pairs and is symmetric") {
    auto rng = make_rng(2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t S = 6;
    Mat a(S, S), b(S, S);
    for (std::size_t i = 0; i < S * S; ++i) {
        a.data()[i] = unif(rng);
        b.data()[i] = unif(rng);
    }
    ODMatrix bt;
    bt.S = S;
    bt.alpha = b;
    double expect = 0.0;
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j)
            expect += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    expect /= static_cast<double>(S * S);
    CHECK(mse_vs_truth(a, bt) == doctest::Approx(expect).epsilon(1e-15));
    ODMatrix at;
    at.S = S;
    at.alpha = a;
    CHECK(mse_vs_truth(b, at) == doctest::Approx(mse_vs_truth(a, bt)).epsilon(1e-15));
}

TEST_CASE("hpd of constant samples has zero width") {
    const auto [lo, hi] = hpd_interval(std::vector<double>(100, 3.25));
    CHECK(lo == 3.25);
    CHECK(hi == 3.25);
}

TEST_CASE("hpd of uniform samples is about 0.95 wide") {
    auto rng = make_rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> samples(100000);
    for (auto& s : samples) s = unif(rng);
    const auto [lo, hi] = hpd_interval(samples);
    CHECK(hi - lo == doctest::Approx(0.95).epsilon(0.011));
}

TEST_CASE("hpd of exponential samples starts near zero and matches brute force") {
    auto rng = make_rng(4);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> samples(20000);
    for (auto& s : samples) s = expo(rng);
    const auto [lo, hi] = hpd_interval(samples);
    CHECK(lo < 0.01);  // mode-anchored, unlike the equal-tailed interval

    // Brute force over all sorted windows.
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = static_cast<std::size_t>(std::ceil(0.95 * sorted.size()));
    double best = 1e300, blo = 0, bhi = 0;
    for (std::size_t i = 0; i + m <= sorted.size(); ++i)
        if (sorted[i + m - 1] - sorted[i] < best) {
            best = sorted[i + m - 1] - sorted[i];
            blo = sorted[i];
            bhi = sorted[i + m - 1];
        }
    CHECK(lo == blo);
    CHECK(hi == bhi);
    CHECK(hi - lo <= sorted.back() - sorted.front());
}

TEST_CASE("hpd requires at least 50 samples") {
    CHECK_THROWS_AS(hpd_interval(std::vector<double>(49, 1.0)), std::invalid_argument);
}

TEST_CASE("split R-hat accepts identical-distribution chains") {
    auto rng = make_rng(5);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<std::vector<double>> chains(2, std::vector<double>(4000));
    for (auto& c : chains)
        for (auto& v : c) v = norm(rng);
    CHECK(r_hat(chains) <= 1.01);
}

TEST_CASE("split R-hat flags separated chains") {
    auto rng = make_rng(6);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<std::vector<double>> chains(2, std::vector<double>(1000));
    for (auto& v : chains[0]) v = norm(rng);
    for (auto& v : chains[1]) v = 10.0 + norm(rng);
    // Plug-in: four split sequences with means {0, 0, 10, 10} give a
    // between-sequence variance of 100/3 on top of W ~ 1.
    CHECK(r_hat(chains) > 1.5);
    CHECK(r_hat(chains) == doctest::Approx(std::sqrt(1.0 + 100.0 / 3.0)).epsilon(0.05));
}

TEST_CASE("R-hat is invariant under affine transforms") {
    auto rng = make_rng(7);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<std::vector<double>> chains(3, std::vector<double>(500));
    for (auto& c : chains)
        for (auto& v : c) v = norm(rng);
    const double base = r_hat(chains);
    for (auto& c : chains)
        for (auto& v : c) v = -4.0 + 7.5 * v;
    CHECK(r_hat(chains) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("constant chains give R-hat 1 by convention") {
    std::vector<std::vector<double>> chains(2, std::vector<double>(100, 2.0));
    CHECK(r_hat(chains) == 1.0);
}

TEST_CASE("ESS of iid draws is close to the sample count") {
    auto rng = make_rng(8);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<std::vector<double>> chains(4, std::vector<double>(1000));
    for (auto& c : chains)
        for (auto& v : c) v = norm(rng);
    const double ratio = effective_sample_size(chains) / 4000.0;
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
}

TEST_CASE("ESS of an AR(1) chain matches the analytic ratio") {
    const double rho = 0.5;
    auto rng = make_rng(9);
    std::normal_distribution<double> norm(0.0, std::sqrt(1.0 - rho * rho));
    std::vector<std::vector<double>> chains;
    for (int c = 0; c < 4; ++c) {
        std::vector<double> chain(20000);
        double x = 0.0;
        for (auto& v : chain) v = x = rho * x + norm(rng);
        chains.push_back(std::move(chain));
    }
    const double ratio = effective_sample_size(chains) / 80000.0;
    CHECK(ratio == doctest::Approx(1.0 / 3.0).epsilon(0.2));
}

TEST_CASE("posterior mean matrix averages the draws cellwise") {
    const std::size_t S = 3;
    const auto single = od_draws(S, 1, 1, [](std::size_t, std::size_t, std::size_t p) {
        return 0.1 * static_cast<double>(p + 1);
    });
    const auto m1 = posterior_mean_matrix(single, S);
    CHECK(m1(0, 1) == doctest::Approx(0.1));
    CHECK(m1(2, 1) == doctest::Approx(0.6));
    CHECK(m1(1, 1) == 0.0);

    const auto pair = od_draws(S, 1, 2, [](std::size_t, std::size_t d, std::size_t p) {
        return d == 0 ? 0.2 : 0.4 + 0.0 * static_cast<double>(p);
    });
    const auto m2 = posterior_mean_matrix(pair, S);
    CHECK(m2(0, 1) == doctest::Approx(0.3).epsilon(1e-15));

    auto rng = make_rng(10);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> store;
    const auto rand = od_draws(S, 2, 50, [&](std::size_t, std::size_t, std::size_t) {
        store.push_back(unif(rng));
        return store.back();
    });
    const auto m3 = posterior_mean_matrix(rand, S);
    // Loop oracle.
    const std::size_t n_alpha = S * (S - 1);
    std::vector<double> expect(n_alpha, 0.0);
    for (std::size_t k = 0; k < store.size(); ++k) expect[k % n_alpha] += store[k] / 100.0;
    CHECK(m3(0, 1) == doctest::Approx(expect[0]).epsilon(1e-12));
    CHECK(m3(2, 1) == doctest::Approx(expect[5]).epsilon(1e-12));
}

TEST_CASE("mean HPD is zero for constant draws and matches the cellwise oracle") {
    const std::size_t S = 3;
    const auto constant =
        od_draws(S, 2, 60, [](std::size_t, std::size_t, std::size_t) { return 0.5; });
    CHECK(mean_hpd(constant, S) == 0.0);

    auto rng = make_rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto rand = od_draws(S, 2, 200, [&](std::size_t, std::size_t, std::size_t) {
        return unif(rng);
    });
    double expect = 0.0;
    for (std::size_t p = 0; p < S * (S - 1); ++p) {
        std::vector<double> pool;
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t d = 0; d < 200; ++d) pool.push_back(rand.values[c](d, p));
        const auto [lo, hi] = hpd_interval(pool);
        expect += hi - lo;
    }
    expect /= static_cast<double>(S * S);
    CHECK(mean_hpd(rand, S) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("absolute OD flow preserves row totals and handles special matrices") {
    const Mat perm = Mat::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    const Mat x = Mat::from_rows({{5, 7, 9}});
    const auto flow = absolute_od_flow(perm, x);
    CHECK(flow(0, 0) == 9.0);
    CHECK(flow(0, 1) == 5.0);
    CHECK(flow(0, 2) == 7.0);

    const std::size_t S = 4;
    Mat uniform(S, S, 1.0 / 3.0);
    for (std::size_t i = 0; i < S; ++i) uniform(i, i) = 0.0;
    const Mat entries = Mat::from_rows({{3, 6, 9, 12}, {1, 1, 1, 1}});
    const auto f2 = absolute_od_flow(uniform, entries);
    for (std::size_t n = 0; n < 2; ++n) {
        double in = 0.0, out = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            in += entries(n, s);
            out += f2(n, s);
        }
        CHECK(out == doctest::Approx(in).epsilon(1e-9));
        for (std::size_t j = 0; j < S; ++j)
            CHECK(f2(n, j) == doctest::Approx((in - entries(n, j)) / 3.0).epsilon(1e-12));
    }

    const auto demand = od_demand_matrix(perm, {2, 3, 4});
    CHECK(demand(0, 1) == 2.0);
    CHECK(demand(1, 2) == 3.0);
    CHECK(demand(2, 0) == 4.0);
}

TEST_CASE("diagnose assembles report fields") {
    const std::size_t S = 3;
    auto rng = make_rng(12);
    std::normal_distribution<double> norm(0.0, 0.01);
    const auto truth = matrix_from({{0, 0.4, 0.6}, {0.3, 0, 0.7}, {0.5, 0.5, 0}});
    const auto draws = od_draws(S, 2, 200, [&](std::size_t, std::size_t, std::size_t p) {
        const std::size_t i = p / (S - 1);
        std::size_t j = p % (S - 1);
        if (j >= i) ++j;
        return truth.alpha(i, j) + norm(rng);
    });
    const std::vector<double> xbar = {10, 10, 10};
    const auto ybar = vec_mat(xbar, truth.alpha);
    const auto rep = diagnose(draws, S, truth, truth.alpha, xbar, ybar);
    CHECK(rep.divergences == 0);
    REQUIRE(rep.mse_mcmc.has_value());
    CHECK(*rep.mse_mcmc < 1e-4);
    REQUIRE(rep.mse_qp.has_value());
    CHECK(*rep.mse_qp == 0.0);
    CHECK(rep.mean_hpd_95 > 0.0);
    REQUIRE(rep.r_hat_max.has_value());
    CHECK(*rep.r_hat_max < 1.05);
    REQUIRE(rep.ess_ratio_min.has_value());
    for (double e : rep.predictive_rel_error) CHECK(e < 0.02);
    CHECK(rep.row_max_coefficient.size() == S);
    CHECK(rep.sparsity_below_1e9 == 0.0);
}
