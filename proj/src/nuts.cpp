#include "odest/nuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "odest/rng.hpp"

namespace odest {

namespace {

constexpr double kDivergenceThreshold = 1000.0;  // energy error that aborts a trajectory
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Phase {
    std::vector<double> q, p, grad;
    double logp = 0.0;
};

// Streaming mean/variance accumulator for mass-matrix estimation.
class Welford {
  public:
    explicit Welford(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}
    void add(const std::vector<double>& x) {
        ++n_;
        for (std::size_t d = 0; d < mean_.size(); ++d) {
            const double delta = x[d] - mean_[d];
            mean_[d] += delta / static_cast<double>(n_);
            m2_[d] += delta * (x[d] - mean_[d]);
        }
    }
    std::size_t count() const { return n_; }
    // Regularized sample variance, shrunk towards a small diagonal.
    std::vector<double> regularized_variance() const {
        std::vector<double> var(mean_.size(), 1.0);
        if (n_ < 2) return var;
        const double n = static_cast<double>(n_);
        const double shrink = n / (n + 5.0);
        for (std::size_t d = 0; d < var.size(); ++d)
            var[d] = shrink * (m2_[d] / (n - 1.0)) + 1e-3 * (1.0 - shrink);
        return var;
    }
    void reset() {
        n_ = 0;
        std::fill(mean_.begin(), mean_.end(), 0.0);
        std::fill(m2_.begin(), m2_.end(), 0.0);
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> mean_, m2_;
};

// Nesterov dual averaging of log step size (Hoffman & Gelman 2014).
class DualAverage {
  public:
    void restart(double step) {
        mu_ = std::log(10.0 * step);
        log_step_ = std::log(step);
        log_step_avg_ = std::log(step);
        h_bar_ = 0.0;
        count_ = 1;
    }
    double update(double accept, double target) {
        const double m = static_cast<double>(count_++);
        h_bar_ = (1.0 - 1.0 / (m + kT0)) * h_bar_ + (target - accept) / (m + kT0);
        log_step_ = mu_ - std::sqrt(m) / kGamma * h_bar_;
        const double eta = std::pow(m, -kKappa);
        log_step_avg_ = eta * log_step_ + (1.0 - eta) * log_step_avg_;
        return std::exp(log_step_);
    }
    double current() const { return std::exp(log_step_); }
    double averaged() const { return std::exp(log_step_avg_); }

  private:
    static constexpr double kGamma = 0.05, kT0 = 10.0, kKappa = 0.75;
    double mu_ = 0.0, log_step_ = 0.0, log_step_avg_ = 0.0, h_bar_ = 0.0;
    int count_ = 1;
};

struct Subtree {
    std::vector<double> proposal_q;
    std::vector<double> rho;          // momentum sum across the subtree
    std::vector<double> p_sharp_beg;  // M^{-1} p at the subtree boundaries
    std::vector<double> p_sharp_end;
    double log_sum_weight = -kInf;
    double sum_metro = 0.0;
    std::size_t n_leapfrog = 0;
    bool divergent = false;
    bool turned = false;
};

struct ChainOutput {
    Mat draws;  // samples x dim (unconstrained)
    std::vector<std::uint8_t> divergent;
    std::vector<int> tree_depth;
    double step_size = 0.0;
    std::size_t warmup_divergences = 0;
    std::size_t warmup_iters = 0;
    std::string error;
};

class NutsChain {
  public:
    NutsChain(const TargetDensity& target, const SamplerConfig& cfg, std::size_t chain_index,
              const std::vector<double>& init)
        : target_(target),
          cfg_(cfg),
          rng_(make_rng(cfg.seed, chain_index + 1, 0xc4a15ULL)),
          inv_mass_(target.dim, 1.0),
          unif_(0.0, 1.0),
          norm_(0.0, 1.0) {
        state_.q = init;
        state_.grad.resize(target.dim);
        state_.logp = target_.logp_grad(state_.q, state_.grad);
        if (!std::isfinite(state_.logp))
            throw std::runtime_error("nuts: log density not finite at the initial point");
    }

    ChainOutput run() {
        ChainOutput out;
        out.draws = Mat(cfg_.samples, target_.dim);
        out.divergent.assign(cfg_.samples, 0);
        out.tree_depth.assign(cfg_.samples, 0);

        step_ = find_reasonable_step();
        da_.restart(step_);
        const AdaptWindows win(cfg_.warmup);
        Welford est(target_.dim);

        for (std::size_t it = 0; it < cfg_.warmup; ++it) {
            const auto res = transition();
            out.warmup_divergences += res.divergent;
            step_ = da_.update(res.accept_stat, cfg_.target_accept);
            if (win.in_mass_window(it)) {
                est.add(state_.q);
                if (win.window_end(it) && est.count() >= 10) {
                    inv_mass_ = est.regularized_variance();
                    est.reset();
                    step_ = find_reasonable_step();
                    da_.restart(step_);
                }
            }
        }
        out.warmup_iters = cfg_.warmup;
        if (cfg_.warmup > 0) {
            if (out.warmup_divergences == cfg_.warmup)
                throw std::runtime_error("nuts: every warmup iteration diverged (step size " +
                                         std::to_string(step_) + ")");
            step_ = da_.averaged();
        }

        for (std::size_t it = 0; it < cfg_.samples; ++it) {
            const auto res = transition();
            for (std::size_t d = 0; d < target_.dim; ++d) out.draws(it, d) = state_.q[d];
            out.divergent[it] = res.divergent ? 1 : 0;
            out.tree_depth[it] = res.depth;
        }
        out.step_size = step_;
        return out;
    }

  private:
    struct TransitionResult {
        double accept_stat = 0.0;
        bool divergent = false;
        int depth = 0;
    };

    // Stan-style warmup phasing: a fast step-size-only opening, expanding
    // mass-estimation windows, and a final step-size-only stretch.
    struct AdaptWindows {
        std::size_t init_end, term_start, warmup;
        explicit AdaptWindows(std::size_t w) : warmup(w) {
            init_end = static_cast<std::size_t>(0.15 * static_cast<double>(w));
            term_start = w - static_cast<std::size_t>(0.10 * static_cast<double>(w));
            if (w < 40) {  // too short for windowed estimation
                init_end = w;
                term_start = w;
            }
        }
        bool in_mass_window(std::size_t it) const { return it >= init_end && it < term_start; }
        bool window_end(std::size_t it) const {
            // Doubling windows of base size 25 starting at init_end; the last
            // window absorbs the remainder up to term_start.
            std::size_t start = init_end, size = 25;
            for (;;) {
                std::size_t end = start + size;
                if (end > term_start || term_start - end < size * 2) end = term_start;
                if (it + 1 == end) return true;
                if (it + 1 < end) return false;
                start = end;
                size *= 2;
                if (start >= term_start) return false;
            }
        }
    };

    double hamiltonian(const Phase& z) const {
        double kin = 0.0;
        for (std::size_t d = 0; d < target_.dim; ++d) kin += inv_mass_[d] * z.p[d] * z.p[d];
        return -z.logp + 0.5 * kin;
    }

    void leapfrog(Phase& z, double eps) {
        for (std::size_t d = 0; d < target_.dim; ++d) z.p[d] += 0.5 * eps * z.grad[d];
        for (std::size_t d = 0; d < target_.dim; ++d) z.q[d] += eps * inv_mass_[d] * z.p[d];
        z.logp = target_.logp_grad(z.q, z.grad);
        for (std::size_t d = 0; d < target_.dim; ++d) z.p[d] += 0.5 * eps * z.grad[d];
    }

    void sample_momentum(Phase& z) {
        z.p.resize(target_.dim);
        for (std::size_t d = 0; d < target_.dim; ++d)
            z.p[d] = norm_(rng_) / std::sqrt(inv_mass_[d]);
    }

    std::vector<double> p_sharp(const Phase& z) const {
        std::vector<double> ps(target_.dim);
        for (std::size_t d = 0; d < target_.dim; ++d) ps[d] = inv_mass_[d] * z.p[d];
        return ps;
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
        return s;
    }

    static bool no_uturn(const std::vector<double>& p_sharp_beg,
                         const std::vector<double>& p_sharp_end,
                         const std::vector<double>& rho) {
        return dot(p_sharp_beg, rho) > 0.0 && dot(p_sharp_end, rho) > 0.0;
    }

    // One step-size heuristic pass: double/halve until the one-step
    // acceptance probability crosses 1/2.
    double find_reasonable_step() {
        double eps = 1.0;
        Phase z = state_;
        sample_momentum(z);
        const double h0 = hamiltonian(z);
        auto accept_prob = [&](double e) {
            Phase trial = z;
            leapfrog(trial, e);
            const double h1 = hamiltonian(trial);
            return std::isfinite(h1) ? std::exp(h0 - h1) : 0.0;
        };
        double a = accept_prob(eps);
        const double dir = a > 0.5 ? 1.0 : -1.0;
        for (int iter = 0; iter < 100; ++iter) {
            eps *= dir > 0 ? 2.0 : 0.5;
            if (eps > 1e7 || eps < 1e-10) break;
            a = accept_prob(eps);
            if ((dir > 0 && a < 0.5) || (dir < 0 && a > 0.5)) break;
        }
        return std::clamp(eps, 1e-10, 1e7);
    }

    Subtree build_tree(int depth, Phase& z, double direction, double h0) {
        Subtree tree;
        if (depth == 0) {
            leapfrog(z, direction * step_);
            const double h = hamiltonian(z);
            const double delta_h = std::isfinite(h) ? h - h0 : kInf;
            tree.divergent = delta_h > kDivergenceThreshold;
            tree.log_sum_weight = -delta_h;
            tree.sum_metro = delta_h > 0.0 ? std::exp(-delta_h) : 1.0;
            tree.n_leapfrog = 1;
            tree.proposal_q = z.q;
            tree.rho = z.p;
            tree.p_sharp_beg = p_sharp(z);
            tree.p_sharp_end = tree.p_sharp_beg;
            return tree;
        }
        Subtree inner = build_tree(depth - 1, z, direction, h0);
        if (inner.divergent || inner.turned) return inner;
        Subtree outer = build_tree(depth - 1, z, direction, h0);
        inner.n_leapfrog += outer.n_leapfrog;
        inner.sum_metro += outer.sum_metro;
        if (outer.divergent || outer.turned) {
            inner.divergent = outer.divergent;
            inner.turned = outer.turned;
            return inner;
        }
        const double lsw = log_add_exp(inner.log_sum_weight, outer.log_sum_weight);
        if (std::log(unif_(rng_)) < outer.log_sum_weight - lsw)
            inner.proposal_q = std::move(outer.proposal_q);
        inner.log_sum_weight = lsw;
        for (std::size_t d = 0; d < target_.dim; ++d) inner.rho[d] += outer.rho[d];
        inner.p_sharp_end = std::move(outer.p_sharp_end);
        inner.turned = !no_uturn(inner.p_sharp_beg, inner.p_sharp_end, inner.rho);
        return inner;
    }

    TransitionResult transition() {
        sample_momentum(state_);
        const double h0 = hamiltonian(state_);

        Phase fwd = state_;
        Phase bwd = state_;
        std::vector<double> rho = state_.p;
        std::vector<double> p_sharp_fwd = p_sharp(state_);
        std::vector<double> p_sharp_bwd = p_sharp_fwd;
        std::vector<double> proposal = state_.q;
        double lsw_total = 0.0;  // weight 1 for the initial state
        double sum_metro = 0.0;
        std::size_t n_leapfrog = 0;

        TransitionResult res;
        for (int depth = 0; depth < cfg_.max_tree_depth; ++depth) {
            const double direction = unif_(rng_) < 0.5 ? -1.0 : 1.0;
            Phase& edge = direction > 0 ? fwd : bwd;
            Subtree tree = build_tree(depth, edge, direction, h0);
            n_leapfrog += tree.n_leapfrog;
            sum_metro += tree.sum_metro;
            if (tree.divergent) {
                res.divergent = true;
                break;
            }
            if (tree.turned) break;
            // Biased progressive sampling favouring the new half.
            if (std::log(unif_(rng_)) < tree.log_sum_weight - lsw_total)
                proposal = tree.proposal_q;
            lsw_total = log_add_exp(lsw_total, tree.log_sum_weight);
            for (std::size_t d = 0; d < target_.dim; ++d) rho[d] += tree.rho[d];
            (direction > 0 ? p_sharp_fwd : p_sharp_bwd) = tree.p_sharp_end;
            res.depth = depth + 1;
            if (!no_uturn(p_sharp_bwd, p_sharp_fwd, rho)) break;
        }

        if (proposal != state_.q) {
            state_.q = std::move(proposal);
            state_.logp = target_.logp_grad(state_.q, state_.grad);
        }
        res.accept_stat = n_leapfrog > 0 ? sum_metro / static_cast<double>(n_leapfrog) : 0.0;
        return res;
    }

    const TargetDensity& target_;
    const SamplerConfig& cfg_;
    RngEngine rng_;
    std::vector<double> inv_mass_;
    std::uniform_real_distribution<double> unif_;
    std::normal_distribution<double> norm_;
    Phase state_;
    DualAverage da_;
    double step_ = 1.0;
};

}  // namespace

void SamplerConfig::validate() const {
    if (chains < 1 || samples < 1) throw std::invalid_argument("SamplerConfig: counts must be >= 1");
    if (max_tree_depth < 1) throw std::invalid_argument("SamplerConfig: max_tree_depth must be >= 1");
    if (!(target_accept > 0.0 && target_accept < 1.0))
        throw std::invalid_argument("SamplerConfig: target_accept must be in (0, 1)");
}

ConstrainMap identity_constrain(std::size_t dim, const std::string& prefix) {
    ConstrainMap map;
    for (std::size_t d = 0; d < dim; ++d) map.names.push_back(prefix + "." + std::to_string(d + 1));
    map.constrain = [](const std::vector<double>& u) { return u; };
    return map;
}

std::vector<double> init_point(std::size_t dim, std::uint64_t seed) {
    auto rng = make_rng(seed, 0x1417ULL);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<double> q(dim);
    for (auto& v : q) v = unif(rng);
    return q;
}

PosteriorDraws nuts_sample(const TargetDensity& target, const ConstrainMap& constrain,
                           const SamplerConfig& cfg,
                           const std::vector<std::vector<double>>* inits) {
    cfg.validate();
    if (target.dim == 0 || !target.logp_grad)
        throw std::invalid_argument("nuts_sample: empty target");
    if (inits && inits->size() != cfg.chains)
        throw std::invalid_argument("nuts_sample: need one init per chain");

    std::vector<ChainOutput> outputs(cfg.chains);
    std::vector<std::string> errors(cfg.chains);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t c = 0; c < cfg.chains; ++c) {
        try {
            const std::vector<double> init =
                inits ? (*inits)[c] : init_point(target.dim, derive_seed(cfg.seed, c + 1, 0x9e1dULL));
            NutsChain chain(target, cfg, c, init);
            outputs[c] = chain.run();
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    }
    for (std::size_t c = 0; c < cfg.chains; ++c)
        if (!errors[c].empty())
            throw std::runtime_error("chain " + std::to_string(c + 1) + ": " + errors[c]);

    PosteriorDraws draws;
    draws.chains = cfg.chains;
    draws.draws_per_chain = cfg.samples;
    draws.param_names = constrain.names;
    for (std::size_t c = 0; c < cfg.chains; ++c) {
        Mat values(cfg.samples, constrain.names.size());
        std::vector<double> u(target.dim);
        for (std::size_t it = 0; it < cfg.samples; ++it) {
            for (std::size_t d = 0; d < target.dim; ++d) u[d] = outputs[c].draws(it, d);
            const auto cvals = constrain.constrain(u);
            if (cvals.size() != constrain.names.size())
                throw std::runtime_error("nuts_sample: constrain map size mismatch");
            for (std::size_t p = 0; p < cvals.size(); ++p) values(it, p) = cvals[p];
        }
        draws.values.push_back(std::move(values));
        draws.divergent.push_back(std::move(outputs[c].divergent));
        draws.tree_depth.push_back(std::move(outputs[c].tree_depth));
        draws.step_size.push_back(outputs[c].step_size);
    }
    return draws;
}

}  // namespace odest
