#include "odest/qp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace odest {

std::vector<double> project_to_simplex(std::vector<double> v) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("project_to_simplex: empty input");
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        css += u[j];
        const double t = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    for (auto& x : v) x = std::max(x - theta, 0.0);
    return v;
}

namespace {

struct Workspace {
    const ObservationSet* obs = nullptr;
    std::vector<double> xbar, ybar;
    bool regularized = false;
    std::size_t S = 0, N = 0;

    // Intercepts minimizing the objective at fixed A (zero if unregularized).
    std::vector<double> optimal_r(const Mat& a) const {
        std::vector<double> r(S, 0.0);
        if (!regularized) return r;
        for (std::size_t n = 0; n < N; ++n) {
            const double* x = obs->X.row(n);
            for (std::size_t j = 0; j < S; ++j) {
                double m = 0.0;
                for (std::size_t i = 0; i < S; ++i) m += a(i, j) * x[i];
                r[j] += obs->Y(n, j) - m;
            }
        }
        for (auto& v : r) v /= static_cast<double>(N + 1);
        return r;
    }

    double objective(const Mat& a, const std::vector<double>& r) const {
        double f = 0.0;
#pragma omp parallel for reduction(+ : f) schedule(static)
        for (std::size_t j = 0; j < S; ++j) {
            for (std::size_t n = 0; n < N; ++n) {
                double m = r[j];
                for (std::size_t i = 0; i < S; ++i) m += a(i, j) * obs->X(n, i);
                const double eps = m - obs->Y(n, j);
                f += eps * eps;
            }
            if (regularized) {
                double mb = 0.0;
                for (std::size_t i = 0; i < S; ++i) mb += a(i, j) * xbar[i];
                const double e = mb - ybar[j];
                f += e * e + r[j] * r[j];
            }
        }
        return f;
    }

    // Gradient w.r.t. A at the envelope point r = optimal_r(a).
    void gradient(const Mat& a, const std::vector<double>& r, Mat& grad) const {
#pragma omp parallel for schedule(static)
        for (std::size_t j = 0; j < S; ++j) {
            for (std::size_t i = 0; i < S; ++i) grad(i, j) = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                double m = r[j];
                for (std::size_t i = 0; i < S; ++i) m += a(i, j) * obs->X(n, i);
                const double eps = 2.0 * (m - obs->Y(n, j));
                for (std::size_t i = 0; i < S; ++i) grad(i, j) += eps * obs->X(n, i);
            }
            if (regularized) {
                double mb = 0.0;
                for (std::size_t i = 0; i < S; ++i) mb += a(i, j) * xbar[i];
                const double e = 2.0 * (mb - ybar[j]);
                for (std::size_t i = 0; i < S; ++i) grad(i, j) += e * xbar[i];
            }
        }
    }

    double lipschitz() const {
        // Power iteration on X^T X (+ xbar xbar^T when regularized).
        std::vector<double> v(S, 1.0 / std::sqrt(static_cast<double>(S))), w(S);
        double lambda = 0.0;
        for (int it = 0; it < 200; ++it) {
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t n = 0; n < N; ++n) {
                const double* x = obs->X.row(n);
                double dot = 0.0;
                for (std::size_t i = 0; i < S; ++i) dot += x[i] * v[i];
                for (std::size_t i = 0; i < S; ++i) w[i] += dot * x[i];
            }
            if (regularized) {
                double dot = 0.0;
                for (std::size_t i = 0; i < S; ++i) dot += xbar[i] * v[i];
                for (std::size_t i = 0; i < S; ++i) w[i] += dot * xbar[i];
            }
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0.0) return 2.0;  // X identically zero
            const double new_lambda = norm;
            for (std::size_t i = 0; i < S; ++i) v[i] = w[i] / norm;
            if (std::abs(new_lambda - lambda) < 1e-12 * new_lambda) {
                lambda = new_lambda;
                break;
            }
            lambda = new_lambda;
        }
        return 2.0 * lambda * 1.1;  // safety margin over the power estimate
    }

    void project_rows(Mat& a) const {
        std::vector<double> row(S - 1);
        for (std::size_t i = 0; i < S; ++i) {
            std::size_t k = 0;
            for (std::size_t j = 0; j < S; ++j)
                if (j != i) row[k++] = a(i, j);
            row = project_to_simplex(std::move(row));
            k = 0;
            a(i, i) = 0.0;
            for (std::size_t j = 0; j < S; ++j)
                if (j != i) a(i, j) = row[k++];
        }
    }
};

}  // namespace

QPSolution solve_qp(const ObservationSet& obs, bool regularized, QPOptions opts) {
    validate_observation_set(obs);
    const std::size_t S = obs.S, N = obs.N;
    if (S < 2) throw std::invalid_argument("solve_qp: S must be >= 2");

    Workspace ws;
    ws.obs = &obs;
    ws.regularized = regularized;
    ws.S = S;
    ws.N = N;
    ws.xbar.assign(S, 0.0);
    ws.ybar.assign(S, 0.0);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t s = 0; s < S; ++s) {
            ws.xbar[s] += obs.X(n, s) / static_cast<double>(N);
            ws.ybar[s] += obs.Y(n, s) / static_cast<double>(N);
        }

    // Uniform rows as the starting point.
    Mat a(S, S, 1.0 / static_cast<double>(S - 1));
    for (std::size_t i = 0; i < S; ++i) a(i, i) = 0.0;

    const double lip = ws.lipschitz();
    const double step = 1.0 / lip;

    std::vector<double> r = ws.optimal_r(a);
    double obj = ws.objective(a, r);

    Mat z = a;  // extrapolation point
    Mat grad(S, S);
    double t = 1.0;
    std::deque<double> window{obj};

    QPSolution sol;
    sol.converged = false;
    std::size_t iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const auto rz = ws.optimal_r(z);
        ws.gradient(z, rz, grad);
        Mat a_next = z;
        for (std::size_t idx = 0; idx < S * S; ++idx) a_next.data()[idx] -= step * grad.data()[idx];
        ws.project_rows(a_next);
        auto r_next = ws.optimal_r(a_next);
        double obj_next = ws.objective(a_next, r_next);

        if (obj_next > obj) {
            // Momentum overshoot: fall back to a plain projected-gradient step
            // from the current iterate, which cannot increase the objective.
            const auto ra = ws.optimal_r(a);
            ws.gradient(a, ra, grad);
            a_next = a;
            for (std::size_t idx = 0; idx < S * S; ++idx)
                a_next.data()[idx] -= step * grad.data()[idx];
            ws.project_rows(a_next);
            r_next = ws.optimal_r(a_next);
            obj_next = ws.objective(a_next, r_next);
            t = 1.0;
            z = a_next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double beta = (t - 1.0) / t_next;
            z = a_next;
            for (std::size_t idx = 0; idx < S * S; ++idx)
                z.data()[idx] += beta * (a_next.data()[idx] - a.data()[idx]);
            t = t_next;
        }
        a = a_next;
        r = r_next;
        obj = std::min(obj, obj_next);

        window.push_back(obj);
        if (window.size() > opts.tol_window + 1) window.pop_front();
        if (window.size() == opts.tol_window + 1) {
            const double drop = window.front() - window.back();
            if (drop <= opts.tol * std::max(1.0, std::abs(window.front()))) {
                sol.converged = true;
                ++iter;
                break;
            }
        }
    }

    // Projected-gradient mapping as the stationarity residual.
    ws.gradient(a, r, grad);
    Mat probe = a;
    for (std::size_t idx = 0; idx < S * S; ++idx) probe.data()[idx] -= step * grad.data()[idx];
    ws.project_rows(probe);
    double kkt = 0.0;
    for (std::size_t idx = 0; idx < S * S; ++idx)
        kkt = std::max(kkt, std::abs(a.data()[idx] - probe.data()[idx]) * lip);

    sol.a_hat = a;
    sol.r_hat = r;
    sol.objective = obj;
    sol.iterations = iter;
    sol.kkt_residual = kkt;
    sol.epsilon = Mat(N, S);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t j = 0; j < S; ++j) {
            double m = r[j];
            for (std::size_t i = 0; i < S; ++i) m += a(i, j) * obs.X(n, i);
            sol.epsilon(n, j) = m - obs.Y(n, j);
        }
    sol.e.assign(S, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        double mb = 0.0;
        for (std::size_t i = 0; i < S; ++i) mb += a(i, j) * ws.xbar[i];
        sol.e[j] = mb - ws.ybar[j];
    }
    return sol;
}

}  // namespace odest
