#include "odest/netgen_b.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "odest/io.hpp"
#include "odest/netgen_a.hpp"
#include "odest/stats.hpp"

namespace odest {

void GenBConfig::validate() const {
    if (S < 2) throw std::invalid_argument("GenBConfig: S must be >= 2");
    if (N < 1 || T < 1) throw std::invalid_argument("GenBConfig: N and T must be >= 1");
    if (!(bin_width_minutes > 0.0)) throw std::invalid_argument("GenBConfig: bin width");
    if (t1 <= t0) throw std::invalid_argument("GenBConfig: t1 must be > t0");
    if (static_cast<std::size_t>(t1 - t0) >= T)
        throw std::invalid_argument("GenBConfig: window gap leaves no arrival bins");
    if (!(phi > 0.0)) throw std::invalid_argument("GenBConfig: phi must be > 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("GenBConfig: eta must be in [0,1]");
    if (ingarch.nu1 < 0 || ingarch.nu2 < 0 || ingarch.xi1 < 0 || ingarch.xi2 < 0)
        throw std::invalid_argument("GenBConfig: INGARCH weights must be >= 0");
    if (ingarch.nu1 + ingarch.nu2 + ingarch.xi1 + ingarch.xi2 >= 1.0)
        throw std::invalid_argument("GenBConfig: INGARCH weights must sum below 1");
}

void TimetableGraph::validate() const {
    const std::size_t n = stations.size();
    if (n < 2) throw std::invalid_argument("TimetableGraph: need at least 2 stations");
    for (const auto& line : lines) {
        if (line.stops.size() < 2)
            throw std::invalid_argument("TimetableGraph: line " + line.name + " too short");
        if (line.run_times.size() + 1 != line.stops.size())
            throw std::invalid_argument("TimetableGraph: line " + line.name + " run time count");
        if (!(line.headway_minutes >= 0.0))
            throw std::invalid_argument("TimetableGraph: negative headway");
        for (std::size_t s : line.stops)
            if (s >= n) throw std::invalid_argument("TimetableGraph: stop index out of range");
        for (double rt : line.run_times)
            if (!(rt >= 0.0)) throw std::invalid_argument("TimetableGraph: negative run time");
    }
    for (const auto& f : transfers) {
        if (f.a >= n || f.b >= n || f.a == f.b)
            throw std::invalid_argument("TimetableGraph: bad footpath");
        if (!(f.walk_minutes >= 0.0))
            throw std::invalid_argument("TimetableGraph: negative walk time");
    }
    if (access.empty()) throw std::invalid_argument("TimetableGraph: no access stations");
    for (std::size_t s : access)
        if (s >= n) throw std::invalid_argument("TimetableGraph: access index out of range");

    // Lines are bidirectional, so reachability over the undirected union of
    // line segments and footpaths gives strong connectivity.
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& line : lines)
        for (std::size_t k = 0; k + 1 < line.stops.size(); ++k) {
            adj[line.stops[k]].push_back(line.stops[k + 1]);
            adj[line.stops[k + 1]].push_back(line.stops[k]);
        }
    for (const auto& f : transfers) {
        adj[f.a].push_back(f.b);
        adj[f.b].push_back(f.a);
    }
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                q.push(w);
            }
    }
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v])
            throw std::invalid_argument("TimetableGraph: station " + stations[v] +
                                        " is unreachable");
}

TimetableGraph load_timetable_json(const std::filesystem::path& path) {
    const auto j = io::read_json_file(path);
    TimetableGraph g;
    for (const auto& s : j.at("stations")) g.stations.push_back(s.get<std::string>());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.stations.size(); ++i) index[g.stations[i]] = i;
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end())
            throw std::runtime_error("timetable: unknown station '" + name + "'");
        return it->second;
    };
    for (const auto& jl : j.at("lines")) {
        TransitLine line;
        line.name = jl.at("name").get<std::string>();
        for (const auto& s : jl.at("stops")) line.stops.push_back(lookup(s.get<std::string>()));
        for (const auto& rt : jl.at("run_times")) line.run_times.push_back(rt.get<double>());
        line.headway_minutes = jl.at("headway").get<double>();
        g.lines.push_back(std::move(line));
    }
    for (const auto& jf : j.at("transfers")) {
        Footpath f;
        f.a = lookup(jf.at("a").get<std::string>());
        f.b = lookup(jf.at("b").get<std::string>());
        f.walk_minutes = jf.at("walk_time").get<double>();
        g.transfers.push_back(f);
    }
    for (const auto& s : j.at("access")) g.access.push_back(lookup(s.get<std::string>()));
    g.validate();
    return g;
}

void write_timetable_json(const std::filesystem::path& path, const TimetableGraph& g) {
    io::json j;
    j["stations"] = g.stations;
    auto& lines = j["lines"] = io::json::array();
    for (const auto& line : g.lines) {
        io::json jl;
        jl["name"] = line.name;
        auto& stops = jl["stops"] = io::json::array();
        for (std::size_t s : line.stops) stops.push_back(g.stations[s]);
        jl["run_times"] = line.run_times;
        jl["headway"] = line.headway_minutes;
        lines.push_back(std::move(jl));
    }
    auto& transfers = j["transfers"] = io::json::array();
    for (const auto& f : g.transfers) {
        io::json jf;
        jf["a"] = g.stations[f.a];
        jf["b"] = g.stations[f.b];
        jf["walk_time"] = f.walk_minutes;
        transfers.push_back(std::move(jf));
    }
    auto& access = j["access"] = io::json::array();
    for (std::size_t s : g.access) access.push_back(g.stations[s]);
    io::write_json_file(path, j);
}

namespace {

// A boardable ride: board line `line` at station `from`, alight at `to`.
struct Ride {
    std::size_t line, to;
    double run_minutes;
};

// For each station, rides reachable by boarding there (both directions).
std::vector<std::vector<Ride>> build_rides(const TimetableGraph& g) {
    std::vector<std::vector<Ride>> rides(g.stations.size());
    for (std::size_t l = 0; l < g.lines.size(); ++l) {
        const auto& line = g.lines[l];
        const std::size_t len = line.stops.size();
        for (std::size_t a = 0; a < len; ++a) {
            double acc = 0.0;
            for (std::size_t b = a + 1; b < len; ++b) {
                acc += line.run_times[b - 1];
                rides[line.stops[a]].push_back({l, line.stops[b], acc});
            }
            acc = 0.0;
            for (std::size_t b = a; b-- > 0;) {
                acc += line.run_times[b];
                rides[line.stops[a]].push_back({l, line.stops[b], acc});
            }
        }
    }
    return rides;
}

std::vector<std::vector<Footpath>> build_footpaths(const TimetableGraph& g) {
    std::vector<std::vector<Footpath>> out(g.stations.size());
    for (const auto& f : g.transfers) {
        out[f.a].push_back(f);
        out[f.b].push_back({f.b, f.a, f.walk_minutes});
    }
    return out;
}

struct PathSearch {
    const TimetableGraph& g;
    std::vector<std::vector<Ride>> rides;
    std::vector<std::vector<Footpath>> footpaths;

    explicit PathSearch(const TimetableGraph& graph)
        : g(graph), rides(build_rides(graph)), footpaths(build_footpaths(graph)) {}

    // A path is an alternating sequence of optional footpath walks and rides:
    // [walk] ride ([walk] ride)* [walk], with at least one ride, no two walks
    // in a row, and no immediate re-boarding of the line just left. Both the
    // Dijkstra bound and the deviation search use this definition.

    // Earliest arrival over states (station, walked-since-ride, ridden).
    double earliest(std::size_t origin, std::size_t destination) const {
        const double inf = std::numeric_limits<double>::infinity();
        const std::size_t n = g.stations.size();
        // state encoding: station * 4 + walked * 2 + ridden
        std::vector<double> dist(n * 4, inf);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        auto push = [&](std::size_t st, double t) {
            if (t < dist[st]) {
                dist[st] = t;
                heap.push({t, st});
            }
        };
        push(origin * 4 + 0, 0.0);
        while (!heap.empty()) {
            auto [t, st] = heap.top();
            heap.pop();
            if (t > dist[st]) continue;
            const std::size_t v = st / 4;
            const bool walked = (st / 2) % 2;
            const bool ridden = st % 2;
            if (v == destination && ridden) return t;
            for (const auto& ride : rides[v])
                push(ride.to * 4 + 0 * 2 + 1,
                     t + 0.5 * g.lines[ride.line].headway_minutes + ride.run_minutes);
            if (!walked)
                for (const auto& f : footpaths[v]) push(f.b * 4 + 1 * 2 + ridden, t + f.walk_minutes);
        }
        return inf;
    }

    void enumerate(std::size_t origin, std::size_t destination, double limit, int max_rides,
                   std::vector<PathAlternative>& out) const {
        PathAlternative cur;
        std::vector<char> visited(g.stations.size(), 0);
        visited[origin] = 1;
        expand(origin, destination, limit, max_rides, 0, cur, visited, out, kNone, false);
    }

  private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    // Expand from a station off-vehicle: board a line here, or (when the
    // previous move was not already a walk) take one footpath first.
    void expand(std::size_t at, std::size_t destination, double limit, int max_rides,
                int rides_used, const PathAlternative& cur, std::vector<char>& visited,
                std::vector<PathAlternative>& out, std::size_t last_line,
                bool just_walked) const {
        if (rides_used >= max_rides) return;
        for (const auto& ride : rides[at]) {
            if (ride.line == last_line) continue;  // staying on board dominates
            if (visited[ride.to]) continue;
            const double wait = 0.5 * g.lines[ride.line].headway_minutes;
            PathAlternative next = cur;
            next.wait_minutes += wait;
            next.in_vehicle_minutes += ride.run_minutes;
            next.total_minutes += wait + ride.run_minutes;
            if (rides_used > 0) ++next.transfers;
            if (next.total_minutes > limit) continue;
            if (ride.to == destination) {
                out.push_back(next);
                continue;
            }
            visited[ride.to] = 1;
            expand(ride.to, destination, limit, max_rides, rides_used + 1, next, visited, out,
                   ride.line, false);
            // Alight and walk straight to a footpath-adjacent destination.
            for (const auto& f : footpaths[ride.to]) {
                if (f.b != destination || visited[f.b]) continue;
                PathAlternative fin = next;
                fin.transfer_minutes += f.walk_minutes;
                fin.total_minutes += f.walk_minutes;
                if (fin.total_minutes <= limit) out.push_back(fin);
            }
            visited[ride.to] = 0;
        }
        if (!just_walked) {
            for (const auto& f : footpaths[at]) {
                if (visited[f.b]) continue;
                PathAlternative next = cur;
                next.transfer_minutes += f.walk_minutes;
                next.total_minutes += f.walk_minutes;
                if (next.total_minutes > limit) continue;
                visited[f.b] = 1;
                expand(f.b, destination, limit, max_rides, rides_used, next, visited, out,
                       last_line, true);
                visited[f.b] = 0;
            }
        }
    }
};

constexpr int kMaxBoardings = 4;

}  // namespace

double earliest_arrival_minutes(const TimetableGraph& g, std::size_t origin,
                                std::size_t destination) {
    return PathSearch(g).earliest(origin, destination);
}

std::vector<PathAlternative> enumerate_paths(const TimetableGraph& g, std::size_t origin,
                                             std::size_t destination,
                                             double /*departure_time_minutes*/,
                                             double arrival_margin_minutes) {
    if (origin == destination)
        throw std::invalid_argument("enumerate_paths: origin equals destination");
    PathSearch search(g);
    const double best = search.earliest(origin, destination);
    if (!std::isfinite(best))
        throw std::runtime_error("enumerate_paths: no path between " + g.stations[origin] +
                                 " and " + g.stations[destination]);
    std::vector<PathAlternative> out;
    search.enumerate(origin, destination, best + arrival_margin_minutes, kMaxBoardings, out);
    if (out.empty())
        throw std::runtime_error("enumerate_paths: deviation search found no alternative");
    std::sort(out.begin(), out.end(), [](const PathAlternative& a, const PathAlternative& b) {
        return a.total_minutes < b.total_minutes;
    });
    return out;
}

std::vector<double> mnl_choice_probs(const std::vector<PathAlternative>& alts,
                                     const std::array<double, 4>& zeta) {
    if (alts.empty()) throw std::invalid_argument("mnl_choice_probs: no alternatives");
    std::vector<double> v(alts.size());
    for (std::size_t k = 0; k < alts.size(); ++k) {
        const auto z = alts[k].attributes();
        v[k] = zeta[0] * z[0] + zeta[1] * z[1] + zeta[2] * z[2] + zeta[3] * z[3];
    }
    const double lse = log_sum_exp(v);
    std::vector<double> p(alts.size());
    for (std::size_t k = 0; k < alts.size(); ++k) p[k] = std::exp(v[k] - lse);
    return p;
}

namespace {
int minutes_to_bins(double minutes, double bin_width) {
    return static_cast<int>(std::floor(minutes / bin_width + 0.5));  // round half up
}
}  // namespace

TravelTimeTable expected_delay_table(const TimetableGraph& g, double departure_time_minutes,
                                     double arrival_margin_minutes, double bin_width_minutes) {
    g.validate();
    const std::size_t S = g.access.size();
    TravelTimeTable table;
    table.S = S;
    table.delays.assign(S * S, 0);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            if (i == j) continue;
            const auto alts = enumerate_paths(g, g.access[i], g.access[j],
                                              departure_time_minutes, arrival_margin_minutes);
            double total = 0.0;
            for (const auto& alt : alts) total += alt.total_minutes;
            const int bins = minutes_to_bins(total / static_cast<double>(alts.size()),
                                             bin_width_minutes);
            table.at(i, j) = std::max(1, bins);
        }
    return table;
}

std::vector<std::uint8_t> transfer_structural_zeros(const TimetableGraph& g) {
    const std::size_t S = g.access.size();
    std::vector<std::uint8_t> mask(S * S, 0);
    for (const auto& f : g.transfers)
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t j = 0; j < S; ++j) {
                if (i == j) continue;
                if ((g.access[i] == f.a && g.access[j] == f.b) ||
                    (g.access[i] == f.b && g.access[j] == f.a))
                    mask[i * S + j] = 1;
            }
    return mask;
}

ODMatrix sample_od_matrix_b(std::size_t S, std::uint64_t seed,
                            const std::vector<std::uint8_t>& structural_zeros) {
    if (S < 2) throw std::invalid_argument("sample_od_matrix_b: S must be >= 2");
    if (!structural_zeros.empty() && structural_zeros.size() != S * S)
        throw std::invalid_argument("sample_od_matrix_b: mask size");
    auto rng = make_rng(seed, 0xb0dULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Destination attractiveness, drawn once per station.
    std::vector<double> c(S);
    for (auto& v : c) v = unif(rng);

    ODMatrix m;
    m.S = S;
    m.alpha = Mat(S, S);
    if (!structural_zeros.empty()) m.structural_zeros = structural_zeros;
    auto masked = [&](std::size_t i, std::size_t j) {
        return !structural_zeros.empty() && structural_zeros[i * S + j] != 0;
    };
    std::vector<double> row;
    for (std::size_t i = 0; i < S; ++i) {
        std::vector<double> conc;
        std::vector<std::size_t> cols;
        std::size_t free_count = 0;
        for (std::size_t j = 0; j < S; ++j) {
            if (j == i) continue;
            conc.push_back(c[j]);
            cols.push_back(j);
            if (!masked(i, j)) ++free_count;
        }
        if (free_count == 0)
            throw std::invalid_argument("sample_od_matrix_b: row " + std::to_string(i) +
                                        " has no feasible destination");
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            if (!sample_dirichlet(conc, rng, row)) continue;
            // Zero the masked pairs and renormalize the remainder.
            double kept = 0.0;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (masked(i, cols[k])) row[k] = 0.0;
                kept += row[k];
            }
            if (!(kept > 0.0)) continue;
            double rmax = 0.0;
            for (auto& v : row) {
                v /= kept;
                rmax = std::max(rmax, v);
            }
            if (free_count > 1 && rmax >= 1.0) continue;  // collapsed after masking
            ok = true;
        }
        if (!ok)
            throw std::runtime_error("sample_od_matrix_b: degenerate Dirichlet draws at row " +
                                     std::to_string(i));
        for (std::size_t k = 0; k < cols.size(); ++k) m.alpha(i, cols[k]) = row[k];
    }
    if (auto v = validate_od_matrix(m))
        throw std::runtime_error("sample_od_matrix_b: invalid matrix at row " +
                                 std::to_string(v->row) + " (" + v->constraint + ")");
    return m;
}

std::vector<double> generate_trend(std::size_t T, double eta, const TrendParams& params,
                                   std::uint64_t seed) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("generate_trend: eta in [0,1]");
    if (T < 1) throw std::invalid_argument("generate_trend: T must be >= 1");
    auto rng = make_rng(seed, 0x7e4dULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t m = T;  // seasonal span equals the window length

    // ARMA on the doubly-differenced scale, then two integrations.
    std::vector<double> eps(T, 0.0), w(T, 0.0), z(T, 0.0);
    auto at = [](const std::vector<double>& v, std::ptrdiff_t idx) {
        return idx >= 0 ? v[static_cast<std::size_t>(idx)] : 0.0;
    };
    for (std::size_t t = 0; t < T; ++t) {
        const auto ti = static_cast<std::ptrdiff_t>(t);
        const auto mi = static_cast<std::ptrdiff_t>(m);
        eps[t] = noise(rng);
        w[t] = params.ar * at(w, ti - 1) + params.seasonal_ar * at(w, ti - mi) -
               params.ar * params.seasonal_ar * at(w, ti - mi - 1) + eps[t] +
               params.ma * at(eps, ti - 1) + params.seasonal_ma * at(eps, ti - mi) +
               params.ma * params.seasonal_ma * at(eps, ti - mi - 1);
        z[t] = w[t] + at(z, ti - 1) + at(z, ti - mi) - at(z, ti - mi - 1);
    }
    const double zmin = *std::min_element(z.begin(), z.end());
    double h_mean = 0.0;
    for (auto& v : z) {
        v -= zmin;  // H_t >= 0
        h_mean += v;
    }
    h_mean /= static_cast<double>(T);
    std::vector<double> f(T);
    for (std::size_t t = 0; t < T; ++t) f[t] = eta * z[t] + (1.0 - eta) * h_mean;
    return f;
}

std::vector<double> simulate_ingarch(std::size_t T, const std::vector<double>& trend, double phi,
                                     double eta, const IngarchParams& params,
                                     std::uint64_t seed) {
    if (trend.size() != T) throw std::invalid_argument("simulate_ingarch: trend length");
    if (!(phi > 0.0)) throw std::invalid_argument("simulate_ingarch: phi must be > 0");
    auto rng = make_rng(seed, 0x16a5ULL);
    const double trend_mean = mean(trend);
    const double omega0 = trend_mean * (1.0 - eta);

    // One burn-in bin ahead of the window; it reuses the first trend value
    // and is dropped from the output.
    std::vector<double> lam(T + 1, 0.0), x(T + 1, 0.0);
    for (std::size_t t = 0; t <= T; ++t) {
        double l = params.nu0;
        if (t >= 1) l += params.nu1 * x[t - 1] + params.xi1 * lam[t - 1];
        if (t >= 2) l += params.nu2 * x[t - 2] + params.xi2 * lam[t - 2];
        if (t == 0) l += omega0;
        l += t == 0 ? trend[0] : trend[t - 1];
        if (!(l > 0.0)) throw std::runtime_error("simulate_ingarch: non-positive mean");
        lam[t] = l;
        x[t] = static_cast<double>(sample_negbin(l, phi, rng));
    }
    return {x.begin() + 1, x.end()};
}

BinnedObservationSet generate_network_b(const GenBConfig& cfg, const TimetableGraph& g,
                                        const ODMatrix& truth) {
    cfg.validate();
    g.validate();
    if (g.access.size() != cfg.S)
        throw std::invalid_argument("generate_network_b: graph access count != S");
    if (truth.S != cfg.S) throw std::invalid_argument("generate_network_b: OD matrix size");

    const std::size_t S = cfg.S, N = cfg.N, T = cfg.T;
    const int gap = cfg.window_gap_bins();
    const std::size_t T_a = T - static_cast<std::size_t>(gap);

    // Path alternatives, choice probabilities and bin delays per OD pair,
    // evaluated once at the proxy departure time.
    std::vector<std::vector<double>> path_probs(S * S);
    std::vector<std::vector<int>> path_bins(S * S);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < S; ++j) {
            if (i == j || truth.alpha(i, j) == 0.0) continue;
            const auto alts = enumerate_paths(g, g.access[i], g.access[j], 8.0 * 60.0,
                                              cfg.arrival_margin_minutes);
            path_probs[i * S + j] = mnl_choice_probs(alts, cfg.zeta);
            auto& bins = path_bins[i * S + j];
            for (const auto& alt : alts)
                bins.push_back(
                    std::max(1, minutes_to_bins(alt.total_minutes, cfg.bin_width_minutes)));
        }

    // Per-station trend, generated once; entry series are per (station,
    // observation) with deterministic sub-seeds.
    std::vector<std::vector<double>> trend(S);
    for (std::size_t s = 0; s < S; ++s)
        trend[s] = generate_trend(T, cfg.eta, cfg.trend, derive_seed(cfg.seed, 0xF1ULL, s));

    BinnedObservationSet out;
    out.S = S;
    out.N = N;
    out.T = T;
    out.T_a = T_a;
    out.bin_width_minutes = cfg.bin_width_minutes;
    out.t0 = cfg.t0;
    out.t1 = cfg.t1;
    out.Xb.assign(N, Mat(T, S));
    out.Yb.assign(N, Mat(T_a, S));
    for (std::size_t s = 0; s < S; ++s)
        out.station_labels.push_back(g.stations[g.access[s]]);

#pragma omp parallel for schedule(static)
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t s = 0; s < S; ++s) {
            const auto series =
                simulate_ingarch(T, trend[s], cfg.phi, cfg.eta, cfg.ingarch,
                                 derive_seed(cfg.seed, 0xF2ULL, s, n));
            for (std::size_t t = 0; t < T; ++t) out.Xb[n](t, s) = series[t];
        }
        auto rng = make_rng(cfg.seed, 0xF3ULL, n);
        std::vector<double> dest_probs(S);
        for (std::size_t t = 0; t < T; ++t) {
            const int td_global = cfg.t0 + static_cast<int>(t);  // 1-based global bin
            for (std::size_t i = 0; i < S; ++i) {
                const auto count = static_cast<long long>(out.Xb[n](t, i));
                if (count <= 0) continue;
                for (std::size_t j = 0; j < S; ++j) dest_probs[j] = truth.alpha(i, j);
                const auto by_dest = multinomial_split(count, dest_probs, rng);
                for (std::size_t j = 0; j < S; ++j) {
                    if (by_dest[j] <= 0) continue;
                    const auto& probs = path_probs[i * S + j];
                    const auto& bins = path_bins[i * S + j];
                    const auto by_path = multinomial_split(by_dest[j], probs, rng);
                    for (std::size_t k = 0; k < by_path.size(); ++k) {
                        if (by_path[k] <= 0) continue;
                        const int arrival_global = td_global + bins[k];
                        // Keep the passengers only when the arrival bin lies
                        // inside the arrival window.
                        if (arrival_global < cfg.t1 ||
                            arrival_global > cfg.t0 + static_cast<int>(T) - 1)
                            continue;
                        const int ta = arrival_global - cfg.t1 + 1;  // 1-based
                        out.Yb[n](static_cast<std::size_t>(ta - 1), j) +=
                            static_cast<double>(by_path[k]);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace odest
