// Times the OpenMP likelihood/gradient kernels against the serial reference
// implementations and reports speedups plus the numeric disagreement.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "odest/ad_model.hpp"
#include "odest/ib_model.hpp"
#include "odest/netgen_a.hpp"
#include "odest/rng.hpp"

using namespace odest;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<double> random_point(std::size_t dim, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> u(dim);
    for (auto& v : u) v = unif(rng);
    return u;
}

template <typename F>
double time_loop(std::size_t reps, F&& f) {
    const double t0 = now_seconds();
    for (std::size_t k = 0; k < reps; ++k) f();
    return (now_seconds() - t0) / static_cast<double>(reps);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

void bench_ib(std::size_t S, std::size_t N, std::size_t reps) {
    GenAConfig cfg;
    cfg.S = S;
    cfg.N = N;
    cfg.mu_x.assign(S, 300.0);
    cfg.phi = 10.0;
    cfg.seed = 11;
    auto [truth, obs] = generate_network_a(cfg);
    const auto model = make_ib_model(std::move(obs), true);
    const auto u = random_point(model.layout.dim_unconstrained(), 3);

    std::vector<double> g_par, g_ser;
    const double lp_par = ib_log_posterior_grad(model, u, g_par);
    const double lp_ser = ib_log_posterior_grad_serial(model, u, g_ser);

    const double t_par = time_loop(reps, [&] { ib_log_posterior_grad(model, u, g_par); });
    const double t_ser = time_loop(reps, [&] { ib_log_posterior_grad_serial(model, u, g_ser); });
    std::printf("ib  S=%-3zu N=%-5zu  serial %9.1f us  omp %9.1f us  speedup %5.2fx  "
                "|dlp|=%.2e  |dgrad|=%.2e\n",
                S, N, t_ser * 1e6, t_par * 1e6, t_ser / t_par, std::abs(lp_par - lp_ser),
                max_abs_diff(g_par, g_ser));
}

void bench_ad(std::size_t S, std::size_t N, std::size_t T, std::size_t reps) {
    auto rng = make_rng(29);
    std::uniform_real_distribution<double> unif(0.0, 40.0);
    std::uniform_int_distribution<int> delay(0, 3);
    BinnedObservationSet b;
    b.S = S;
    b.N = N;
    b.T = T;
    b.t0 = 1;
    b.t1 = 4;
    b.T_a = T - 3;
    b.bin_width_minutes = 5;
    b.Xb.assign(N, Mat(T, S));
    b.Yb.assign(N, Mat(b.T_a, S));
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t s = 0; s < S; ++s) b.Xb[n](t, s) = unif(rng);
        for (std::size_t t = 0; t < b.T_a; ++t)
            for (std::size_t s = 0; s < S; ++s) b.Yb[n](t, s) = unif(rng);
    }
    TravelTimeTable delays;
    delays.S = S;
    delays.delays.assign(S * S, 0);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j)
            if (i != j) delays.at(i, j) = delay(rng);

    const auto model = build_assignment(std::move(b), std::move(delays));
    const auto u = random_point(model.layout.dim_unconstrained(), 5);

    std::vector<double> g_par, g_ser;
    const double lp_par = ad_log_posterior_grad(model, u, g_par);
    const double lp_ser = ad_log_posterior_grad_serial(model, u, g_ser);

    const double t_par = time_loop(reps, [&] { ad_log_posterior_grad(model, u, g_par); });
    const double t_ser = time_loop(reps, [&] { ad_log_posterior_grad_serial(model, u, g_ser); });
    std::printf("ad  S=%-3zu N=%-5zu T=%-3zu serial %9.1f us  omp %9.1f us  speedup %5.2fx  "
                "|dlp|=%.2e  |dgrad|=%.2e\n",
                S, N, T, t_ser * 1e6, t_par * 1e6, t_ser / t_par, std::abs(lp_par - lp_ser),
                max_abs_diff(g_par, g_ser));
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    bench_ib(15, 30, 200);
    bench_ib(30, 100, 50);
    bench_ib(60, 200, 20);
    bench_ad(15, 50, 24, 20);
    bench_ad(15, 100, 24, 10);
    return 0;
}
