#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "odest/types.hpp"

namespace odest {

struct SamplerConfig {
    std::size_t chains = 4;
    std::size_t warmup = 1500;
    std::size_t samples = 1000;
    int max_tree_depth = 10;
    double target_accept = 0.8;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Log density with gradient over an unconstrained space. Must be safe to
/// call from several chains at once.
struct TargetDensity {
    std::size_t dim = 0;
    std::function<double(const std::vector<double>&, std::vector<double>&)> logp_grad;
};

/// Maps unconstrained draws to the constrained values that get stored.
struct ConstrainMap {
    std::vector<std::string> names;
    std::function<std::vector<double>(const std::vector<double>&)> constrain;
};

ConstrainMap identity_constrain(std::size_t dim, const std::string& prefix = "x");

/// Random chain initialization: each unconstrained coordinate ~ U(-2, 2).
std::vector<double> init_point(std::size_t dim, std::uint64_t seed);

/// Multi-chain NUTS with dual-averaging step-size adaptation and diagonal
/// mass-matrix estimation during warmup. Chains run concurrently; per-chain
/// randomness is derived deterministically from (seed, chain index). Only
/// post-warmup draws are returned. Throws on a non-finite density at an
/// initial point or an all-divergent warmup.
PosteriorDraws nuts_sample(const TargetDensity& target, const ConstrainMap& constrain,
                           const SamplerConfig& cfg,
                           const std::vector<std::vector<double>>* inits = nullptr);

}  // namespace odest
