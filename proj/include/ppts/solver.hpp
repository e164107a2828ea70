#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppts/distribution.hpp"
#include "ppts/errors.hpp"
#include "ppts/quadrature.hpp"
#include "ppts/support.hpp"
#include "ppts/tridiagonal.hpp"

namespace ppts {

/// Candidate point set: finite, strictly increasing, interior to the support.
using Alpha = std::vector<double>;

struct NewtonConfig {
    double residual_tol = 1e-15;     // absolute infinity-norm threshold on g
    int max_iterations = 200;
    int max_step_halvings = 30;      // damping applied only to restore ordering
    bool force_general = false;      // skip the symmetric reductions
};

enum class SolvePath {
    explicit_mean,
    symmetric_n2,
    symmetric_n3,
    symmetric_even,
    symmetric_odd,
    general,
};

inline const char* to_string(SolvePath p) {
    switch (p) {
        case SolvePath::explicit_mean: return "explicit-mean";
        case SolvePath::symmetric_n2: return "symmetric-n2";
        case SolvePath::symmetric_n3: return "symmetric-n3";
        case SolvePath::symmetric_even: return "symmetric-even";
        case SolvePath::symmetric_odd: return "symmetric-odd";
        case SolvePath::general: return "general";
    }
    return "general";
}

struct SolverReport {
    Alpha points;
    double residual_inf_norm = 0.0;  // of the full n-point system
    int iterations = 0;              // Newton updates on the path actually taken
    double distortion = 0.0;
    SolvePath path = SolvePath::general;
};

inline void validate_alpha(const Alpha& alpha, const SupportInterval& support) {
    if (alpha.empty()) {
        throw std::invalid_argument("alpha: must contain at least one point");
    }
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (!std::isfinite(alpha[i])) {
            throw std::invalid_argument("alpha: entries must be finite");
        }
        if (!support.interior(alpha[i])) {
            throw std::invalid_argument("alpha: entry " + std::to_string(alpha[i]) +
                                        " is not interior to the support");
        }
        if (i > 0 && !(alpha[i - 1] < alpha[i])) {
            throw std::invalid_argument("alpha: entries must be strictly increasing");
        }
    }
}

/// Voronoi cell boundaries for alpha: support lower end, the n-1 pairwise
/// midpoints, support upper end. Size n+1; the ends may be infinite.
inline std::vector<double> midpoints(const Alpha& alpha, const SupportInterval& support) {
    validate_alpha(alpha, support);
    std::vector<double> m(alpha.size() + 1);
    m.front() = support.lower();
    for (std::size_t i = 1; i < alpha.size(); ++i) {
        m[i] = 0.5 * (alpha[i - 1] + alpha[i]);
    }
    m.back() = support.upper();
    return m;
}

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::abs(x));
    return norm;
}

inline std::string format_scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// The nonlinear cell system over a (possibly reduced) domain [left, right).
// With variable_left set, the lower cell edge is alpha[0]/2 and moves with
// alpha[0]; this realizes the odd-n half-domain reduction.
struct CellSystem {
    const DistributionModel* model;
    double left;
    double right;
    bool variable_left;

    std::vector<double> mids(const Alpha& a) const {
        std::vector<double> m(a.size() + 1);
        m.front() = variable_left ? 0.5 * a.front() : left;
        for (std::size_t i = 1; i < a.size(); ++i) {
            m[i] = 0.5 * (a[i - 1] + a[i]);
        }
        m.back() = right;
        return m;
    }

    bool valid(const Alpha& a) const {
        const double floor = variable_left ? 0.0 : left;
        double prev = floor;
        for (double x : a) {
            if (!std::isfinite(x) || !(prev < x)) return false;
            prev = x;
        }
        return a.back() < right;
    }

    // g_j = a_j * mass(cell_j) - first_moment(cell_j): zero exactly when each
    // point is the conditional mean of its cell. Evaluated as the signed first
    // moment about a_j so quadrature-backed models keep full absolute accuracy
    // in the far tail, where a_j dwarfs the cell moment.
    std::vector<double> residual(const Alpha& a) const {
        const std::vector<double> m = mids(a);
        std::vector<double> g(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            g[i] = -partial_first_moment_about(*model, a[i], m[i], m[i + 1]);
        }
        return g;
    }

    // Analytic derivative of the residual: symmetric tridiagonal, with
    // d g_j / d a_j = mass_j - f(m_{j-1}) l_{j-1}/4 - f(m_j) l_j/4 and
    // d g_j / d a_{j+1} = -f(m_j) l_j / 4 where l_j is the gap between
    // neighboring points (zero at the domain ends, so no boundary density
    // values enter). The moving lower edge of the odd reduction contributes
    // -f(m_0) a_1/4 to the first diagonal entry. Cell masses are requested at
    // a roundoff-limited absolute tolerance: tail-cell diagonal entries fall
    // many orders below the default tolerance for heavy-tailed models, and
    // quadrature error at the default level would swamp them.
    TridiagonalMatrix jacobian(const Alpha& a) const {
        const std::size_t n = a.size();
        const std::vector<double> m = mids(a);
        TridiagonalMatrix J;
        J.diag.resize(n);
        J.offdiag.resize(n > 0 ? n - 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            double d = probability_mass(*model, m[i], m[i + 1], {.abs_tol = 1e-22});
            if (i > 0) {
                d -= 0.25 * model->pdf(m[i]) * (a[i] - a[i - 1]);
            } else if (variable_left) {
                d -= 0.25 * model->pdf(m[0]) * a[0];
            }
            if (i + 1 < n) {
                const double coupling = 0.25 * model->pdf(m[i + 1]) * (a[i + 1] - a[i]);
                d -= coupling;
                J.offdiag[i] = -coupling;
            }
            J.diag[i] = d;
        }
        return J;
    }
};

struct NewtonOutcome {
    Alpha points;
    int iterations = 0;
};

// Damped Newton iteration on the cell system. Full steps are halved only as
// far as needed to keep the iterate strictly ordered and interior; there is
// no line search on the residual norm.
inline NewtonOutcome newton_iterate(const CellSystem& sys, Alpha alpha,
                                    const NewtonConfig& cfg, const std::string& label) {
    if (!sys.valid(alpha)) {
        throw std::invalid_argument(label + ": initial guess is not ordered and interior");
    }
    for (int iter = 0;; ++iter) {
        const std::vector<double> g = sys.residual(alpha);
        const double norm = inf_norm(g);
        if (norm < cfg.residual_tol) {
            return NewtonOutcome{std::move(alpha), iter};
        }
        if (iter >= cfg.max_iterations) {
            throw ConvergenceError(label + ": no convergence after " +
                                       std::to_string(iter) + " iterations (residual " +
                                       format_scientific(norm) + ")",
                                   iter, norm);
        }
        const std::vector<double> step = tridiag_solve(sys.jacobian(alpha), g);
        double t = 1.0;
        Alpha trial(alpha.size());
        for (int halvings = 0;; ++halvings) {
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                trial[i] = alpha[i] - t * step[i];
            }
            if (sys.valid(trial)) break;
            if (halvings >= cfg.max_step_halvings) {
                throw OrderingError(label + ": step damping exhausted after " +
                                    std::to_string(halvings) + " halvings at iteration " +
                                    std::to_string(iter));
            }
            t *= 0.5;
        }
        alpha.swap(trial);
    }
}

// Starting points for `count` points on [lo, hi) (hi may be infinite):
// the unit-offset ladder lo + 1 + (j-1)/(count-1) for semi-infinite domains,
// equally spaced interior points otherwise.
inline Alpha edge_guess(double lo, double hi, int count) {
    Alpha a(count);
    if (count == 1) {
        a[0] = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
        return a;
    }
    if (!std::isfinite(hi)) {
        for (int j = 0; j < count; ++j) {
            a[j] = lo + 1.0 + static_cast<double>(j) / (count - 1);
        }
    } else {
        for (int j = 0; j < count; ++j) {
            a[j] = lo + (hi - lo) * (j + 1) / (count + 1);
        }
    }
    return a;
}

// Mirror a positive half-domain solution through the origin, inserting the
// center point for odd n.
inline Alpha mirror(const Alpha& half, bool with_center) {
    Alpha full;
    full.reserve(2 * half.size() + (with_center ? 1 : 0));
    for (std::size_t i = half.size(); i-- > 0;) {
        full.push_back(-half[i]);
    }
    if (with_center) {
        full.push_back(0.0);
    }
    full.insert(full.end(), half.begin(), half.end());
    return full;
}

inline void require_symmetric(const DistributionModel& model, const char* op) {
    if (!model.symmetric_about_zero()) {
        throw std::invalid_argument(std::string(op) + ": model is not symmetric about zero");
    }
}

}  // namespace detail

/// Self-consistency residual of the full n-point system.
inline std::vector<double> residual(const DistributionModel& model, const Alpha& alpha) {
    validate_alpha(alpha, model.support());
    detail::CellSystem sys{&model, model.support().lower(), model.support().upper(), false};
    return sys.residual(alpha);
}

/// Analytic Jacobian of the full-system residual (symmetric tridiagonal).
inline TridiagonalMatrix jacobian(const DistributionModel& model, const Alpha& alpha) {
    validate_alpha(alpha, model.support());
    detail::CellSystem sys{&model, model.support().lower(), model.support().upper(), false};
    return sys.jacobian(alpha);
}

/// Mean squared distance of the distribution to the point set: the sum over
/// Voronoi cells of the second moment about the cell's point.
inline double distortion(const DistributionModel& model, const Alpha& alpha) {
    const std::vector<double> m = midpoints(alpha, model.support());
    double v = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        v += partial_second_moment_about(model, alpha[i], m[i], m[i + 1]);
    }
    return v;
}

/// Starting point set for an n-point solve, chosen by support shape. For the
/// full line, symmetric models mirror the half-domain ladder (matching the
/// reduced system actually solved) and non-symmetric ones get a quantile
/// ladder: a_j at the (2j-1)/(2n) quantile of the model, located by bisection
/// on the quadrature CDF. Placement by mass keeps every starting cell fed for
/// any tail shape; points seeded deep in a thin tail leave their cell with
/// vanishing mass and a numerically singular Jacobian row.
inline Alpha initial_guess(const DistributionModel& model, int n) {
    if (n < 1) {
        throw std::invalid_argument("initial_guess: requires n >= 1");
    }
    const double lo = model.support().lower();
    const double hi = model.support().upper();
    const bool lower_finite = std::isfinite(lo);
    const bool upper_finite = std::isfinite(hi);
    if (lower_finite) {
        return detail::edge_guess(lo, hi, n);
    }
    if (upper_finite) {
        // Mirror of the semi-infinite ladder.
        Alpha g = detail::edge_guess(-hi, std::numeric_limits<double>::infinity(), n);
        Alpha out(n);
        for (int j = 0; j < n; ++j) {
            out[j] = -g[n - 1 - j];
        }
        return out;
    }
    if (model.symmetric_about_zero()) {
        if (n == 1) return {0.0};
        Alpha half = detail::edge_guess(0.0, hi, n / 2);
        return detail::mirror(half, n % 2 == 1);
    }
    const auto cdf = [&](double x) { return probability_mass(model, lo, x); };
    double w = 1.0;
    while (cdf(-w) > 0.5 / n || cdf(w) < 1.0 - 0.5 / n) {
        w *= 2.0;
        if (w > 1e12) {
            throw NumericalError("initial_guess: quantile bracket search diverged");
        }
    }
    Alpha a(n);
    double left = -w;
    for (int j = 0; j < n; ++j) {
        const double p = (2.0 * j + 1.0) / (2.0 * n);
        double lo_edge = left;
        double hi_edge = w;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo_edge + hi_edge);
            (cdf(mid) < p ? lo_edge : hi_edge) = mid;
        }
        a[j] = 0.5 * (lo_edge + hi_edge);
        left = a[j];
    }
    return a;
}

namespace detail {

inline NewtonOutcome solve_symmetric_n3_core(const DistributionModel& model,
                                             const NewtonConfig& cfg) {
    const double d = model.support().upper();
    double a = std::isfinite(d) ? 0.5 * d : 1.0;
    const std::string label = model.name() + " n=3 (scalar reduction)";
    for (int iter = 0;; ++iter) {
        const double mass = probability_mass(model, 0.5 * a, d);
        const double g = -partial_first_moment_about(model, a, 0.5 * a, d);
        if (std::abs(g) < cfg.residual_tol) {
            return NewtonOutcome{{-a, 0.0, a}, iter};
        }
        if (iter >= cfg.max_iterations) {
            throw ConvergenceError(label + ": no convergence after " + std::to_string(iter) +
                                       " iterations (residual " + format_scientific(std::abs(g)) +
                                       ")",
                                   iter, std::abs(g));
        }
        const double dg = mass - 0.25 * a * model.pdf(0.5 * a);
        if (std::abs(dg) < 1e-30) {
            throw SingularMatrixError(label + ": scalar Newton derivative underflow");
        }
        const double step = g / dg;
        double t = 1.0;
        int halvings = 0;
        while (!(a - t * step > 0.0 && a - t * step < d)) {
            if (halvings++ >= cfg.max_step_halvings) {
                throw OrderingError(label + ": step damping exhausted");
            }
            t *= 0.5;
        }
        a -= t * step;
    }
}

}  // namespace detail

/// n = 2 on a symmetric model: the positive point is twice the half-line
/// partial expectation; no iteration.
inline Alpha solve_symmetric_n2(const DistributionModel& model) {
    detail::require_symmetric(model, "solve_symmetric_n2");
    const double phi = 2.0 * partial_expectation(model, 0.0, model.support().upper());
    return {-phi, phi};
}

/// n = 3 on a symmetric model: scalar Newton for the positive point; the
/// middle point is exactly zero.
inline Alpha solve_symmetric_n3(const DistributionModel& model, const NewtonConfig& cfg = {}) {
    detail::require_symmetric(model, "solve_symmetric_n3");
    return detail::solve_symmetric_n3_core(model, cfg).points;
}

/// Even n >= 4 on a symmetric model: solve the n/2-point system on the
/// positive half-domain (lower cell edge pinned at 0) and mirror.
inline Alpha solve_symmetric_even(const DistributionModel& model, int n,
                                  const NewtonConfig& cfg = {}) {
    detail::require_symmetric(model, "solve_symmetric_even");
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument("solve_symmetric_even: requires even n >= 4");
    }
    const double d = model.support().upper();
    detail::CellSystem sys{&model, 0.0, d, false};
    detail::NewtonOutcome half = detail::newton_iterate(
        sys, detail::edge_guess(0.0, d, n / 2), cfg,
        model.name() + " n=" + std::to_string(n) + " (even half-domain reduction)");
    return detail::mirror(half.points, false);
}

/// Odd n >= 5 on a symmetric model: solve (n-1)/2 points on the positive
/// half-domain with the lower cell edge moving as a_1/2, then mirror around
/// the center point at zero.
inline Alpha solve_symmetric_odd(const DistributionModel& model, int n,
                                 const NewtonConfig& cfg = {}) {
    detail::require_symmetric(model, "solve_symmetric_odd");
    if (n < 5 || n % 2 != 1) {
        throw std::invalid_argument("solve_symmetric_odd: requires odd n >= 5");
    }
    const double d = model.support().upper();
    detail::CellSystem sys{&model, 0.0, d, true};
    detail::NewtonOutcome half = detail::newton_iterate(
        sys, detail::edge_guess(0.0, d, (n - 1) / 2), cfg,
        model.name() + " n=" + std::to_string(n) + " (odd half-domain reduction)");
    return detail::mirror(half.points, true);
}

/// Compute the n optimal points of the model. Symmetric models route through
/// the reductions above unless force_general is set; everything else runs
/// damped Newton on the full system from initial_guess. The report carries
/// the full-system residual regardless of the path taken.
inline SolverReport newton_solve(const DistributionModel& model, int n,
                                 const NewtonConfig& cfg = {}) {
    if (n < 1) {
        throw std::invalid_argument("newton_solve: requires n >= 1");
    }
    if (n > 10000) {
        throw std::invalid_argument("newton_solve: n is limited to 10000");
    }
    SolverReport report;
    if (n == 1) {
        const double lo = model.support().lower();
        const double hi = model.support().upper();
        const double mass = probability_mass(model, lo, hi);
        const double mean = partial_expectation(model, lo, hi) / mass;
        report.points = {mean};
        report.iterations = 0;
        report.path = SolvePath::explicit_mean;
    } else if (model.symmetric_about_zero() && !cfg.force_general) {
        if (n == 2) {
            report.points = solve_symmetric_n2(model);
            report.iterations = 0;
            report.path = SolvePath::symmetric_n2;
        } else if (n == 3) {
            detail::NewtonOutcome out = detail::solve_symmetric_n3_core(model, cfg);
            report.points = std::move(out.points);
            report.iterations = out.iterations;
            report.path = SolvePath::symmetric_n3;
        } else if (n % 2 == 0) {
            const double d = model.support().upper();
            detail::CellSystem sys{&model, 0.0, d, false};
            detail::NewtonOutcome half = detail::newton_iterate(
                sys, detail::edge_guess(0.0, d, n / 2), cfg,
                model.name() + " n=" + std::to_string(n) + " (even half-domain reduction)");
            report.points = detail::mirror(half.points, false);
            report.iterations = half.iterations;
            report.path = SolvePath::symmetric_even;
        } else {
            const double d = model.support().upper();
            detail::CellSystem sys{&model, 0.0, d, true};
            detail::NewtonOutcome half = detail::newton_iterate(
                sys, detail::edge_guess(0.0, d, (n - 1) / 2), cfg,
                model.name() + " n=" + std::to_string(n) + " (odd half-domain reduction)");
            report.points = detail::mirror(half.points, true);
            report.iterations = half.iterations;
            report.path = SolvePath::symmetric_odd;
        }
    } else {
        detail::CellSystem sys{&model, model.support().lower(), model.support().upper(), false};
        detail::NewtonOutcome out = detail::newton_iterate(
            sys, initial_guess(model, n), cfg,
            model.name() + " n=" + std::to_string(n) + " (general)");
        report.points = std::move(out.points);
        report.iterations = out.iterations;
        report.path = SolvePath::general;
    }
    report.residual_inf_norm = detail::inf_norm(residual(model, report.points));
    report.distortion = distortion(model, report.points);
    return report;
}

}  // namespace ppts
