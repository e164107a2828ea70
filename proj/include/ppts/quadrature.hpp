#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "ppts/errors.hpp"
#include "ppts/support.hpp"

namespace ppts {

struct QuadratureConfig {
    double abs_tol = 1e-14;
    double rel_tol = 1e-13;
    int max_subdivisions = 10000;
};

struct IntegralEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;  // Gauss-Kronrod panel evaluations performed
};

/// One finite parameter interval produced by transforming an infinite
/// integration domain: integral f(x) dx over the original piece equals
/// integral f(x_of_t(t)) * weight(t) dt over [t_lower, t_upper].
struct MappedPiece {
    double t_lower;
    double t_upper;
    std::function<double(double)> x_of_t;
    std::function<double(double)> weight;
};

/// Transform an interval with at least one infinite end into finite pieces.
/// [c, +inf) maps through x = c + t/(1-t) with weight 1/(1-t)^2, t in [0,1);
/// (-inf, d] mirrors that; (-inf, +inf) is split at 0 into the two
/// semi-infinite pieces. Tails are never truncated.
inline std::vector<MappedPiece> map_infinite(ExtendedBound lo, ExtendedBound hi) {
    if (lo.finite() && hi.finite()) {
        throw std::invalid_argument("map_infinite: interval is already finite");
    }
    if (!(lo.value < hi.value)) {
        throw std::invalid_argument("map_infinite: requires lo < hi");
    }
    auto right_piece = [](double c) {
        return MappedPiece{
            0.0, 1.0,
            [c](double t) { return c + t / (1.0 - t); },
            [](double t) { double u = 1.0 - t; return 1.0 / (u * u); }};
    };
    auto left_piece = [](double d) {
        return MappedPiece{
            0.0, 1.0,
            [d](double t) { return d - t / (1.0 - t); },
            [](double t) { double u = 1.0 - t; return 1.0 / (u * u); }};
    };
    if (!lo.finite() && !hi.finite()) {
        return {left_piece(0.0), right_piece(0.0)};
    }
    if (!hi.finite()) {
        return {right_piece(lo.value)};
    }
    return {left_piece(hi.value)};
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

enum class PieceKind { direct, right_infinite, left_infinite };

// Evaluates the (possibly transformed) integrand at parameter t.
template <class F>
double transformed(F& f, PieceKind kind, double anchor, double t) {
    switch (kind) {
        case PieceKind::direct:
            return f(t);
        case PieceKind::right_infinite: {
            double u = 1.0 - t;
            if (u <= 0.0) return 0.0;
            double fx = f(anchor + t / u);
            if (fx == 0.0) return 0.0;
            return fx / (u * u);
        }
        case PieceKind::left_infinite: {
            double u = 1.0 - t;
            if (u <= 0.0) return 0.0;
            double fx = f(anchor - t / u);
            if (fx == 0.0) return 0.0;
            return fx / (u * u);
        }
    }
    return 0.0;
}

struct Panel {
    double a;
    double b;
    double value;
    double error;
    double resabs;  // integral of |f| over the panel, for the roundoff floor
    PieceKind kind;
    double anchor;
};

// One Gauss-Kronrod application over [a, b], with the QUADPACK-style error
// estimate: the Gauss/Kronrod discrepancy is damped through the measured
// variation of the integrand so the estimate stays honest near convergence.
template <class F>
Panel gk15(F& f, PieceKind kind, double anchor, double a, double b) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = transformed(f, kind, anchor, center);
    double resg = fc * kGaussWeights[3];
    double resk = fc * kKronrodWeights[7];
    double resabs = std::abs(resk);
    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGkNodes[j];
        fv1[j] = transformed(f, kind, anchor, center - dx);
        fv2[j] = transformed(f, kind, anchor, center + dx);
        const double fsum = fv1[j] + fv2[j];
        if (j % 2 == 1) {
            resg += kGaussWeights[j / 2] * fsum;
        }
        resk += kKronrodWeights[j] * fsum;
        resabs += kKronrodWeights[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    }
    const double reskh = resk * 0.5;
    double resasc = kKronrodWeights[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kKronrodWeights[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    resabs *= std::abs(h);
    resasc *= std::abs(h);

    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) {
        err = std::max(eps * 50.0 * resabs, err);
    }
    return Panel{a, b, resk * h, err, resabs, kind, anchor};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7/15 integration of f over (lo, hi). Infinite ends
/// are transformed via map_infinite's substitutions. The interval with the
/// largest error estimate is bisected until the summed error drops below
/// max(abs_tol, rel_tol * |value|); exhausting max_subdivisions panel
/// evaluations raises QuadratureError carrying the best value reached.
template <class F>
IntegralEstimate integrate(F&& f, ExtendedBound lo, ExtendedBound hi,
                           QuadratureConfig cfg = {}) {
    using detail::Panel;
    using detail::PieceKind;
    if (!(lo.value < hi.value)) {
        throw std::invalid_argument("integrate: requires lo < hi");
    }

    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);

    int evaluations = 0;
    auto seed = [&](PieceKind kind, double anchor, double a, double b) {
        heap.push(detail::gk15(f, kind, anchor, a, b));
        ++evaluations;
    };
    if (lo.finite() && hi.finite()) {
        seed(PieceKind::direct, 0.0, lo.value, hi.value);
    } else if (!lo.finite() && !hi.finite()) {
        seed(PieceKind::left_infinite, 0.0, 0.0, 1.0);
        seed(PieceKind::right_infinite, 0.0, 0.0, 1.0);
    } else if (!hi.finite()) {
        seed(PieceKind::right_infinite, lo.value, 0.0, 1.0);
    } else {
        seed(PieceKind::left_infinite, hi.value, 0.0, 1.0);
    }

    double total_value = 0.0;
    double total_error = 0.0;
    double total_resabs = 0.0;
    {
        std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> copy = heap;
        while (!copy.empty()) {
            total_value += copy.top().value;
            total_error += copy.top().error;
            total_resabs += copy.top().resabs;
            copy.pop();
        }
    }

    // The roundoff floor scales with the integral of |f|: when the integrand
    // cancels (total near zero against large resabs), the summed panel error
    // estimates cannot drop below ~50 eps resabs, so demanding less would
    // subdivide forever.
    const double eps = std::numeric_limits<double>::epsilon();
    auto tolerance = [&] {
        return std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total_value),
                         100.0 * eps * total_resabs});
    };

    while (total_error > tolerance()) {
        if (evaluations >= cfg.max_subdivisions) {
            throw QuadratureError(
                "integrate: subdivision limit " + std::to_string(cfg.max_subdivisions) +
                    " exhausted; best value " + std::to_string(total_value) +
                    " with error estimate " + std::to_string(total_error),
                total_value, total_error);
        }
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            // Interval already at roundoff width; further splitting is futile.
            throw QuadratureError(
                "integrate: interval collapsed to roundoff width before reaching "
                "tolerance; best value " + std::to_string(total_value) +
                    " with error estimate " + std::to_string(total_error),
                total_value, total_error);
        }
        heap.pop();
        Panel left = detail::gk15(f, worst.kind, worst.anchor, worst.a, mid);
        Panel right = detail::gk15(f, worst.kind, worst.anchor, mid, worst.b);
        evaluations += 2;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }
    return IntegralEstimate{total_value, total_error, evaluations};
}

}  // namespace ppts
