#pragma once

#include <cstddef>
#include <vector>

#include "odest/types.hpp"

namespace odest {

struct QPOptions {
    double tol = 1e-9;              // relative objective decrease over the window
    std::size_t tol_window = 50;
    std::size_t max_iterations = 100000;
};

struct QPSolution {
    Mat a_hat;                  // S x S point estimates, rows on the simplex
    std::vector<double> r_hat;  // intercepts (zero when unregularized)
    double objective = 0.0;
    Mat epsilon;                // N x S fit residuals
    std::vector<double> e;      // per-station mean residuals
    std::size_t iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;  // projected-gradient mapping norm at exit
};

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::vector<double> v);

/// Constrained least-squares point estimate of the OD matrix. Minimizes the
/// squared fit residuals plus, when regularized, the squared intercepts and
/// the squared mean residuals, subject to row-simplex constraints. Solved by
/// monotone FISTA with exact row projections; intercepts are eliminated in
/// closed form each iteration.
QPSolution solve_qp(const ObservationSet& obs, bool regularized = true, QPOptions opts = {});

}  // namespace odest
