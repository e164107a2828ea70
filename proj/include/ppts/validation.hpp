#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppts/distribution.hpp"
#include "ppts/errors.hpp"
#include "ppts/solver.hpp"

namespace ppts {

struct LloydConfig {
    double movement_tol = 1e-13;  // infinity-norm of the point movement
    int max_iterations = 100000;
};

/// One fixed-point sweep: replace every point by the conditional mean of its
/// current Voronoi cell.
inline Alpha lloyd_iterate(const DistributionModel& model, const Alpha& alpha) {
    const std::vector<double> m = midpoints(alpha, model.support());
    Alpha next(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double mass = probability_mass(model, m[i], m[i + 1]);
        if (mass < 1e-30) {
            throw ZeroMassCellError("lloyd_iterate: cell " + std::to_string(i) +
                                    " carries no probability mass");
        }
        next[i] = partial_expectation(model, m[i], m[i + 1]) / mass;
    }
    return next;
}

/// Fixed-point iteration to a stationary point set, independent of the
/// Newton machinery. Linear convergence; intended as a cross-check.
inline Alpha lloyd_solve(const DistributionModel& model, int n, const LloydConfig& cfg = {}) {
    Alpha alpha = initial_guess(model, n);
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        Alpha next = lloyd_iterate(model, alpha);
        double movement = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            movement = std::max(movement, std::abs(next[i] - alpha[i]));
        }
        alpha.swap(next);
        if (movement < cfg.movement_tol) {
            return alpha;
        }
    }
    throw ConvergenceError("lloyd_solve: " + model.name() + " n=" + std::to_string(n) +
                               " did not settle within " + std::to_string(cfg.max_iterations) +
                               " sweeps",
                           cfg.max_iterations, 0.0);
}

struct GridSolution {
    Alpha points;           // centroids of the optimal atom grouping
    double distortion = 0.0;  // of the discretized problem
    double grid_spacing = 0.0;
    double lower = 0.0;     // truncation window actually used
    double upper = 0.0;
};

namespace detail {

// Smallest |edge| (by doubling then bisection) at which the tail beyond the
// edge holds less than tail_mass probability.
inline double clip_edge(const DistributionModel& model, bool upper_tail, double tail_mass) {
    const double lo = model.support().lower();
    const double hi = model.support().upper();
    const auto tail = [&](double edge) {
        return upper_tail ? probability_mass(model, edge, hi)
                          : probability_mass(model, lo, edge);
    };
    double inside = 0.0;  // tail(inside) assumed >= tail_mass unless mass tiny at 0
    double outside = upper_tail ? 1.0 : -1.0;
    while (tail(outside) >= tail_mass) {
        inside = outside;
        outside *= 2.0;
        if (std::abs(outside) > 1e12) {
            throw NumericalError("grid_bruteforce: tail truncation search diverged");
        }
    }
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (tail(mid) >= tail_mass) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return outside;
}

}  // namespace detail

/// Discretize the model onto equal-width cells (one atom of the cell's mass
/// at the cell midpoint) over a window covering all but `tail_clip` of the
/// probability, and solve the n-grouping problem exactly by interval dynamic
/// programming. Exhaustive over groupings, so reliable but coarse: points are
/// only trustworthy to a small multiple of the grid spacing.
inline GridSolution grid_bruteforce(const DistributionModel& model, int n, int num_atoms = 2000,
                                    double tail_clip = 1e-8) {
    if (n < 1 || n > 4) {
        throw std::invalid_argument("grid_bruteforce: supports 1 <= n <= 4");
    }
    if (num_atoms < n || num_atoms > 2000) {
        throw std::invalid_argument("grid_bruteforce: num_atoms must lie in [n, 2000]");
    }
    const bool clip_lower = !std::isfinite(model.support().lower());
    const bool clip_upper = !std::isfinite(model.support().upper());
    const double side_clip = clip_lower && clip_upper ? 0.5 * tail_clip : tail_clip;
    GridSolution sol;
    sol.lower = clip_lower ? detail::clip_edge(model, false, side_clip)
                           : model.support().lower();
    sol.upper = clip_upper ? detail::clip_edge(model, true, side_clip)
                           : model.support().upper();
    const int N = num_atoms;
    sol.grid_spacing = (sol.upper - sol.lower) / N;

    std::vector<double> w(N), wy(N), wyy(N);
    for (int k = 0; k < N; ++k) {
        const double a = sol.lower + sol.grid_spacing * k;
        const double b = (k + 1 == N) ? sol.upper : sol.lower + sol.grid_spacing * (k + 1);
        const double mass = probability_mass(model, a, b);
        const double y = 0.5 * (a + b);
        w[k] = mass;
        wy[k] = mass * y;
        wyy[k] = mass * y * y;
    }
    std::vector<double> W(N + 1, 0.0), WY(N + 1, 0.0), WYY(N + 1, 0.0);
    for (int k = 0; k < N; ++k) {
        W[k + 1] = W[k] + w[k];
        WY[k + 1] = WY[k] + wy[k];
        WYY[k + 1] = WYY[k] + wyy[k];
    }
    // Cost of merging atoms [i, j) into one group at their centroid.
    const auto cost = [&](int i, int j) {
        const double mass = W[j] - W[i];
        if (mass <= 0.0) return 0.0;
        const double mean = (WY[j] - WY[i]) / mass;
        return (WYY[j] - WYY[i]) - mass * mean * mean;
    };

    const double kInf = std::numeric_limits<double>::infinity();
    // best[g][j]: optimal cost of covering atoms [0, j) with g groups.
    std::vector<std::vector<double>> best(n + 1, std::vector<double>(N + 1, kInf));
    std::vector<std::vector<int>> split(n + 1, std::vector<int>(N + 1, 0));
    best[0][0] = 0.0;
    for (int g = 1; g <= n; ++g) {
        for (int j = g; j <= N; ++j) {
            for (int i = g - 1; i < j; ++i) {
                if (best[g - 1][i] == kInf) continue;
                const double c = best[g - 1][i] + cost(i, j);
                if (c < best[g][j]) {
                    best[g][j] = c;
                    split[g][j] = i;
                }
            }
        }
    }
    sol.distortion = best[n][N];
    std::vector<int> edges(n + 1);
    edges[n] = N;
    for (int g = n; g >= 1; --g) {
        edges[g - 1] = split[g][edges[g]];
    }
    sol.points.resize(n);
    for (int g = 0; g < n; ++g) {
        const double mass = W[edges[g + 1]] - W[edges[g]];
        if (mass <= 0.0) {
            throw ZeroMassCellError("grid_bruteforce: empty group in optimal partition");
        }
        sol.points[g] = (WY[edges[g + 1]] - WY[edges[g]]) / mass;
    }
    return sol;
}

struct JacobianCheck {
    double max_band_deviation = 0.0;  // analytic vs. central-difference, on the band
    double max_off_band = 0.0;        // largest |entry| outside the tridiagonal band
};

/// Compare the analytic Jacobian against central finite differences of the
/// residual, column by column.
inline JacobianCheck jacobian_fd_check(const DistributionModel& model, const Alpha& alpha,
                                       double h = 1e-6) {
    const TridiagonalMatrix J = jacobian(model, alpha);
    const std::size_t n = alpha.size();
    JacobianCheck check;
    for (std::size_t k = 0; k < n; ++k) {
        Alpha plus = alpha;
        Alpha minus = alpha;
        plus[k] += h;
        minus[k] -= h;
        const std::vector<double> gp = residual(model, plus);
        const std::vector<double> gm = residual(model, minus);
        for (std::size_t i = 0; i < n; ++i) {
            const double fd = (gp[i] - gm[i]) / (2.0 * h);
            if (i == k) {
                check.max_band_deviation =
                    std::max(check.max_band_deviation, std::abs(fd - J.diag[i]));
            } else if (i + 1 == k || k + 1 == i) {
                const std::size_t off = std::min(i, k);
                check.max_band_deviation =
                    std::max(check.max_band_deviation, std::abs(fd - J.offdiag[off]));
            } else {
                check.max_off_band = std::max(check.max_off_band, std::abs(fd));
            }
        }
    }
    return check;
}

struct ConvergenceSeries {
    int n = 0;
    std::vector<int> k_values;
    std::vector<double> deviations;  // max point distance to the normal solution
};

/// Solve the n-point problem for student-t at each k and record how far the
/// points sit from the normal-model points; the sequence should fall toward
/// zero as k grows.
inline ConvergenceSeries t_convergence_experiment(int n, const std::vector<int>& k_values,
                                                  const NewtonConfig& cfg = {}) {
    ConvergenceSeries series;
    series.n = n;
    const Alpha reference = newton_solve(catalog_make("normal"), n, cfg).points;
    for (int k : k_values) {
        const Alpha pts =
            newton_solve(catalog_make("student-t", {{"k", static_cast<double>(k)}}), n, cfg)
                .points;
        double dev = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            dev = std::max(dev, std::abs(pts[i] - reference[i]));
        }
        series.k_values.push_back(k);
        series.deviations.push_back(dev);
    }
    return series;
}

}  // namespace ppts
