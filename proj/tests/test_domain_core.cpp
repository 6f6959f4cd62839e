#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "odest/io.hpp"
#include "odest/rng.hpp"
#include "odest/types.hpp"

using namespace odest;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "odest_domain_test";
    std::filesystem::create_directories(dir);
    return dir;
}

ODMatrix make_matrix(const std::vector<std::vector<double>>& rows) {
    ODMatrix m;
    m.S = rows.size();
    m.alpha = Mat::from_rows(rows);
    return m;
}

}  // namespace

TEST_CASE("validate_od_matrix accepts the forced 2x2 permutation") {
    const auto m = make_matrix({{0, 1}, {1, 0}});
    CHECK_FALSE(validate_od_matrix(m).has_value());
}

TEST_CASE("validate_od_matrix reports a nonzero diagonal first") {
    const auto m = make_matrix({{0.1, 0.9}, {1, 0}});
    const auto v = validate_od_matrix(m);
    REQUIRE(v.has_value());
    CHECK(v->row == 0);
    CHECK(v->constraint == "diagonal");
}

TEST_CASE("validate_od_matrix flags a 1e-6 row-sum residual") {
    const auto m = make_matrix({{0, 0.5, 0.499999}, {0.5, 0, 0.5}, {0.5, 0.5, 0}});
    const auto v = validate_od_matrix(m);
    REQUIRE(v.has_value());
    CHECK(v->row == 0);
    CHECK(v->constraint == "sum-to-one");
    CHECK(v->residual == doctest::Approx(1e-6).epsilon(1e-3));
}

TEST_CASE("validate_od_matrix respects structural zeros") {
    auto m = make_matrix({{0, 0.5, 0.5}, {0.5, 0, 0.5}, {1, 0, 0}});
    m.structural_zeros = std::vector<std::uint8_t>(9, 0);
    (*m.structural_zeros)[0 * 3 + 1] = 1;  // alpha(0,1) forbidden but set
    const auto v = validate_od_matrix(m);
    REQUIRE(v.has_value());
    CHECK(v->row == 0);
    CHECK(v->constraint == "structural-zero");
}

TEST_CASE("aggregate_bins sums a single-station series") {
    BinnedObservationSet b;
    b.S = 1;
    b.N = 1;
    b.T = 3;
    b.T_a = 3;
    b.bin_width_minutes = 5;
    b.t0 = 1;
    b.t1 = 1;
    b.Xb = {Mat::from_rows({{1}, {2}, {3}})};
    b.Yb = {Mat::from_rows({{1}, {2}, {3}})};
    const auto obs = aggregate_bins(b);
    CHECK(obs.X(0, 0) == 6.0);
    CHECK(obs.Y(0, 0) == 6.0);
}

TEST_CASE("aggregate_bins on all-zero bins gives all-zero aggregates") {
    BinnedObservationSet b;
    b.S = 2;
    b.N = 2;
    b.T = 4;
    b.T_a = 3;
    b.bin_width_minutes = 5;
    b.t0 = 1;
    b.t1 = 2;
    b.Xb.assign(2, Mat(4, 2));
    b.Yb.assign(2, Mat(3, 2));
    const auto obs = aggregate_bins(b);
    CHECK(obs.X.sum() == 0.0);
    CHECK(obs.Y.sum() == 0.0);
}

TEST_CASE("aggregate_bins matches per-element summation and conserves mass") {
    auto rng = make_rng(42);
    std::uniform_real_distribution<double> unif(0.0, 9.0);
    BinnedObservationSet b;
    b.S = 3;
    b.N = 2;
    b.T = 4;
    b.T_a = 3;
    b.bin_width_minutes = 5;
    b.t0 = 1;
    b.t1 = 2;
    b.Xb.assign(2, Mat(4, 3));
    b.Yb.assign(2, Mat(3, 3));
    for (std::size_t n = 0; n < 2; ++n) {
        for (std::size_t t = 0; t < 4; ++t)
            for (std::size_t s = 0; s < 3; ++s) b.Xb[n](t, s) = unif(rng);
        for (std::size_t t = 0; t < 3; ++t)
            for (std::size_t s = 0; s < 3; ++s) b.Yb[n](t, s) = unif(rng);
    }
    const auto obs = aggregate_bins(b);
    // Brute-force per-element re-summation.
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t s = 0; s < 3; ++s) {
            double x = 0.0, y = 0.0;
            for (std::size_t t = 0; t < 4; ++t) x += b.Xb[n](t, s);
            for (std::size_t t = 0; t < 3; ++t) y += b.Yb[n](t, s);
            CHECK(obs.X(n, s) == doctest::Approx(x).epsilon(1e-15));
            CHECK(obs.Y(n, s) == doctest::Approx(y).epsilon(1e-15));
        }
    double xb_total = 0.0, yb_total = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
        xb_total += b.Xb[n].sum();
        yb_total += b.Yb[n].sum();
    }
    CHECK(obs.X.sum() == doctest::Approx(xb_total).epsilon(1e-15));
    CHECK(obs.Y.sum() == doctest::Approx(yb_total).epsilon(1e-15));
}

TEST_CASE("observation set CSV round-trip is exact") {
    const auto dir = temp_dir();
    ObservationSet obs;
    obs.S = 3;
    obs.N = 4;
    obs.station_labels = {"a", "b", "c"};
    obs.X = Mat(4, 3);
    obs.Y = Mat(4, 3);
    auto rng = make_rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1234.5);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t s = 0; s < 3; ++s) {
            obs.X(n, s) = unif(rng);
            obs.Y(n, s) = unif(rng);
        }
    io::write_observation_set(dir / "X.csv", dir / "Y.csv", obs);
    const auto back = io::read_observation_set(dir / "X.csv", dir / "Y.csv");
    CHECK(back.station_labels == obs.station_labels);
    CHECK(back.X == obs.X);  // %.17g keeps doubles bit-exact
    CHECK(back.Y == obs.Y);
}

TEST_CASE("binned set round-trip preserves metadata and counts") {
    const auto dir = temp_dir();
    BinnedObservationSet b;
    b.S = 2;
    b.N = 2;
    b.T = 3;
    b.T_a = 2;
    b.bin_width_minutes = 15;
    b.t0 = 1;
    b.t1 = 2;
    b.station_labels = {"u", "v"};
    b.Xb.assign(2, Mat(3, 2));
    b.Yb.assign(2, Mat(2, 2));
    b.Xb[0](0, 0) = 1.25;
    b.Xb[1](2, 1) = 7;
    b.Yb[1](1, 0) = 3.5;
    io::write_binned_set(dir / "Xb.csv", dir / "Yb.csv", dir / "meta.json", b);
    const auto back = io::read_binned_set(dir / "Xb.csv", dir / "Yb.csv", dir / "meta.json");
    CHECK(back.T == b.T);
    CHECK(back.T_a == b.T_a);
    CHECK(back.t0 == b.t0);
    CHECK(back.t1 == b.t1);
    CHECK(back.bin_width_minutes == b.bin_width_minutes);
    CHECK(back.Xb[0] == b.Xb[0]);
    CHECK(back.Xb[1] == b.Xb[1]);
    CHECK(back.Yb[1] == b.Yb[1]);
}

TEST_CASE("OD matrix CSV and JSON round-trips are exact") {
    const auto dir = temp_dir();
    auto m = make_matrix({{0, 1.0 / 3, 2.0 / 3}, {0.125, 0, 0.875}, {0.6, 0.4, 0}});
    io::write_od_matrix_csv(dir / "od.csv", m);
    const auto csv_back = io::read_od_matrix_csv(dir / "od.csv");
    CHECK(csv_back.alpha == m.alpha);

    m.structural_zeros = std::vector<std::uint8_t>(9, 0);
    (*m.structural_zeros)[2 * 3 + 1] = 1;
    io::write_od_matrix_json(dir / "od.json", m);
    const auto json_back = io::read_od_matrix_json(dir / "od.json");
    CHECK(json_back.alpha == m.alpha);
    REQUIRE(json_back.structural_zeros.has_value());
    CHECK((*json_back.structural_zeros)[2 * 3 + 1] == 1);
}

TEST_CASE("draws round-trip keeps values, flags, and layout") {
    const auto dir = temp_dir() / "draws";
    PosteriorDraws d;
    d.chains = 2;
    d.draws_per_chain = 3;
    d.param_names = {"alpha.1.2", "alpha.2.1", "sigma.1"};
    for (std::size_t c = 0; c < 2; ++c) {
        Mat v(3, 3);
        for (std::size_t i = 0; i < 9; ++i) v.data()[i] = 0.01 * static_cast<double>(i + c);
        d.values.push_back(v);
        d.divergent.push_back({0, static_cast<std::uint8_t>(c), 0});
        d.tree_depth.push_back({3, 4, 5});
        d.step_size.push_back(0.25 + 0.5 * static_cast<double>(c));
    }
    io::write_draws(dir, d);
    const auto back = io::read_draws(dir);
    CHECK(back.chains == 2);
    CHECK(back.param_names == d.param_names);
    CHECK(back.values[0] == d.values[0]);
    CHECK(back.values[1] == d.values[1]);
    CHECK(back.divergent[1][1] == 1);
    CHECK(back.tree_depth[0][2] == 5);
    CHECK(back.step_size[1] == d.step_size[1]);
}
