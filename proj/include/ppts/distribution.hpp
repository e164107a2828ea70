#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ppts/errors.hpp"
#include "ppts/quadrature.hpp"
#include "ppts/support.hpp"

namespace ppts {

/// Optional closed-form definite integrals over a subinterval [lo, hi] of the
/// support closure (lo and hi may be infinite). Each member may be empty
/// independently; consumers fall back to quadrature. They are stored as cell
/// integrals rather than cumulative maps so that tail cells are computed from
/// tail-side primitives without catastrophic cancellation.
struct CellMoments {
    std::function<double(double, double)> mass;    // integral of f
    std::function<double(double, double)> first;   // integral of x f
    std::function<double(double, double)> second;  // integral of x^2 f
};

/// A univariate continuous distribution: density, support, symmetry flag and
/// whatever closed-form moment integrals the family admits. Instances are
/// immutable after construction; create them through catalog_make,
/// make_custom or affine_model.
class DistributionModel {
  public:
    DistributionModel(std::string name, SupportInterval support,
                      std::function<double(double)> pdf, bool symmetric_about_zero,
                      std::map<std::string, double> parameters, CellMoments closed)
        : name_(std::move(name)),
          support_(support),
          pdf_(std::move(pdf)),
          symmetric_(symmetric_about_zero),
          parameters_(std::move(parameters)),
          closed_(std::move(closed)) {}

    const std::string& name() const { return name_; }
    const SupportInterval& support() const { return support_; }
    bool symmetric_about_zero() const { return symmetric_; }
    const std::map<std::string, double>& parameters() const { return parameters_; }
    const CellMoments& closed_forms() const { return closed_; }

    /// Density value; zero outside the open support and at infinite x.
    double pdf(double x) const {
        if (!std::isfinite(x) || !support_.interior(x)) return 0.0;
        return pdf_(x);
    }

  private:
    std::string name_;
    SupportInterval support_;
    std::function<double(double)> pdf_;
    bool symmetric_;
    std::map<std::string, double> parameters_;
    CellMoments closed_;
};

namespace detail {

using TailFn = std::function<double(double)>;  // x >= 0 -> integral_x^inf of the integrand

// Cell integral over [lo, hi] contained in [0, inf), from an upper-tail
// primitive.
inline std::function<double(double, double)> cell_from_tail(TailFn t) {
    return [t = std::move(t)](double lo, double hi) { return t(lo) - t(hi); };
}

// Cell integral for an even integrand on the full line. `total` is the
// integral over the whole line, used when the cell straddles the origin.
// std::abs keeps reflected arguments clear of negative zero.
inline std::function<double(double, double)> cell_even(TailFn t, double total) {
    return [t = std::move(t), total](double lo, double hi) {
        if (lo >= 0.0) return t(lo + 0.0) - t(hi);
        if (hi <= 0.0) return t(std::abs(hi)) - t(std::abs(lo));
        return total - t(std::abs(lo)) - t(hi);
    };
}

// Cell integral for an odd integrand on the full line.
inline std::function<double(double, double)> cell_odd(TailFn t) {
    return [t = std::move(t)](double lo, double hi) {
        if (lo >= 0.0) return t(lo + 0.0) - t(hi);
        if (hi <= 0.0) return -(t(std::abs(hi)) - t(std::abs(lo)));
        return t(std::abs(lo)) - t(hi);
    };
}

// Cell integral from a plain antiderivative, for bounded supports.
inline std::function<double(double, double)> cell_from_antiderivative(
    std::function<double(double)> a) {
    return [a = std::move(a)](double lo, double hi) { return a(hi) - a(lo); };
}

inline bool is_small_integer(double v) {
    return v == std::floor(v) && v >= 1.0 && v <= 30.0;
}

// sum_{j=0}^{m} z^j / j!
inline double poisson_partial_sum(double z, int m) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j <= m; ++j) {
        term *= z / j;
        sum += term;
    }
    return sum;
}

inline double require_param(const std::map<std::string, double>& p, const std::string& key) {
    return p.at(key);
}

inline std::map<std::string, double> merge_parameters(
    const std::string& family, const std::map<std::string, double>& defaults,
    const std::map<std::string, double>& given) {
    std::map<std::string, double> merged = defaults;
    for (const auto& [key, value] : given) {
        if (merged.find(key) == merged.end()) {
            throw std::invalid_argument(family + ": unknown parameter '" + key + "'");
        }
        merged[key] = value;
    }
    return merged;
}

}  // namespace detail

/// Subinterval probability P(lo <= X <= hi). Closed forms are used when the
/// model carries them, adaptive quadrature otherwise.
inline double probability_mass(const DistributionModel& model, ExtendedBound lo,
                               ExtendedBound hi, QuadratureConfig cfg = {}) {
    if (!(lo.value <= hi.value)) {
        throw std::invalid_argument("probability_mass: requires lo <= hi");
    }
    if (lo.value < model.support().lower() || hi.value > model.support().upper()) {
        throw std::invalid_argument("probability_mass: interval outside the support closure");
    }
    if (lo.value == hi.value) return 0.0;
    double value;
    if (model.closed_forms().mass) {
        value = model.closed_forms().mass(lo.value, hi.value);
    } else {
        value = integrate([&](double x) { return model.pdf(x); }, lo, hi, cfg).value;
    }
    return std::max(0.0, value);
}

/// Unnormalized first moment over [lo, hi]: integral of x f(x).
inline double partial_expectation(const DistributionModel& model, ExtendedBound lo,
                                  ExtendedBound hi, QuadratureConfig cfg = {}) {
    if (!(lo.value <= hi.value)) {
        throw std::invalid_argument("partial_expectation: requires lo <= hi");
    }
    if (lo.value < model.support().lower() || hi.value > model.support().upper()) {
        throw std::invalid_argument("partial_expectation: interval outside the support closure");
    }
    if (lo.value == hi.value) return 0.0;
    if (model.closed_forms().first) {
        return model.closed_forms().first(lo.value, hi.value);
    }
    return integrate([&](double x) { return x * model.pdf(x); }, lo, hi, cfg).value;
}

/// Integral of (x - center) f(x) over [lo, hi], signed. The quadrature branch
/// integrates the combined integrand in one pass at a tightened absolute
/// tolerance, so the result keeps full absolute accuracy even when `center`
/// is orders of magnitude larger than the moment itself.
inline double partial_first_moment_about(const DistributionModel& model, double center,
                                         ExtendedBound lo, ExtendedBound hi,
                                         QuadratureConfig cfg = {.abs_tol = 1e-22}) {
    if (!(lo.value <= hi.value)) {
        throw std::invalid_argument("partial_first_moment_about: requires lo <= hi");
    }
    if (lo.value < model.support().lower() || hi.value > model.support().upper()) {
        throw std::invalid_argument(
            "partial_first_moment_about: interval outside the support closure");
    }
    if (lo.value == hi.value) return 0.0;
    const CellMoments& cf = model.closed_forms();
    if (cf.mass && cf.first) {
        return cf.first(lo.value, hi.value) - center * cf.mass(lo.value, hi.value);
    }
    return integrate([&](double x) { return (x - center) * model.pdf(x); }, lo, hi, cfg).value;
}

/// Integral of (x - center)^2 f(x) over [lo, hi]. Composed from the three
/// closed-form moments when all are present, else integrated directly.
inline double partial_second_moment_about(const DistributionModel& model, double center,
                                          ExtendedBound lo, ExtendedBound hi,
                                          QuadratureConfig cfg = {}) {
    if (!(lo.value <= hi.value)) {
        throw std::invalid_argument("partial_second_moment_about: requires lo <= hi");
    }
    if (lo.value < model.support().lower() || hi.value > model.support().upper()) {
        throw std::invalid_argument(
            "partial_second_moment_about: interval outside the support closure");
    }
    if (lo.value == hi.value) return 0.0;
    const CellMoments& cf = model.closed_forms();
    double value;
    if (cf.mass && cf.first && cf.second) {
        value = cf.second(lo.value, hi.value) - 2.0 * center * cf.first(lo.value, hi.value) +
                center * center * cf.mass(lo.value, hi.value);
    } else {
        value = integrate([&](double x) { return (x - center) * (x - center) * model.pdf(x); },
                          lo, hi, cfg)
                    .value;
    }
    return std::max(0.0, value);
}

namespace detail {

inline DistributionModel make_normal() {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343819;
    auto phi = [](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); };
    TailFn t0 = [](double x) {
        if (!std::isfinite(x)) return 0.0;
        return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0);
    };
    TailFn t1 = [phi](double x) {
        if (!std::isfinite(x)) return 0.0;
        return phi(x);
    };
    TailFn t2 = [t0, phi](double x) {
        if (!std::isfinite(x)) return 0.0;
        return t0(x) + x * phi(x);
    };
    CellMoments cf;
    cf.mass = cell_even(t0, 1.0);
    cf.first = cell_odd(t1);
    cf.second = cell_even(t2, 1.0);  // E X^2 = 1
    return DistributionModel(
        "normal",
        SupportInterval(ExtendedBound::neg_infinity(), ExtendedBound::pos_infinity()),
        phi, true, {}, cf);
}

inline DistributionModel make_exponential() {
    TailFn t0 = [](double x) { return std::isfinite(x) ? std::exp(-x) : 0.0; };
    TailFn t1 = [](double x) { return std::isfinite(x) ? (1.0 + x) * std::exp(-x) : 0.0; };
    TailFn t2 = [](double x) {
        return std::isfinite(x) ? (x * (x + 2.0) + 2.0) * std::exp(-x) : 0.0;
    };
    CellMoments cf;
    cf.mass = cell_from_tail(t0);
    cf.first = cell_from_tail(t1);
    cf.second = cell_from_tail(t2);
    return DistributionModel(
        "exponential", SupportInterval(0.0, ExtendedBound::pos_infinity()),
        [](double x) { return std::exp(-x); }, false, {}, cf);
}

inline DistributionModel make_double_exponential() {
    TailFn t0 = [](double x) { return std::isfinite(x) ? 0.5 * std::exp(-x) : 0.0; };
    TailFn t1 = [](double x) { return std::isfinite(x) ? 0.5 * (1.0 + x) * std::exp(-x) : 0.0; };
    TailFn t2 = [](double x) {
        return std::isfinite(x) ? 0.5 * (x * (x + 2.0) + 2.0) * std::exp(-x) : 0.0;
    };
    CellMoments cf;
    cf.mass = cell_even(t0, 1.0);
    cf.first = cell_odd(t1);
    cf.second = cell_even(t2, 2.0);  // E X^2 = 2
    return DistributionModel(
        "double-exponential",
        SupportInterval(ExtendedBound::neg_infinity(), ExtendedBound::pos_infinity()),
        [](double x) { return 0.5 * std::exp(-std::abs(x)); }, true, {}, cf);
}

inline DistributionModel make_uniform() {
    CellMoments cf;
    cf.mass = cell_from_antiderivative([](double x) { return x; });
    cf.first = cell_from_antiderivative([](double x) { return 0.5 * x * x; });
    cf.second = cell_from_antiderivative([](double x) { return x * x * x / 3.0; });
    return DistributionModel("uniform", SupportInterval(0.0, 1.0),
                             [](double) { return 1.0; }, false, {}, cf);
}

inline DistributionModel make_beta1(const std::map<std::string, double>& given) {
    auto p = merge_parameters("beta1", {{"r", 2.0}, {"s", 2.0}}, given);
    const double r = p.at("r");
    const double s = p.at("s");
    if (!(r > 0.0) || !(s > 0.0)) {
        throw std::invalid_argument("beta1: requires r > 0 and s > 0");
    }
    const double log_beta = std::lgamma(r) + std::lgamma(s) - std::lgamma(r + s);
    const double inv_beta = std::exp(-log_beta);
    auto pdf = [r, s, inv_beta](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return inv_beta * std::pow(x, r - 1.0) * std::pow(1.0 - x, s - 1.0);
    };
    CellMoments cf;
    if (is_small_integer(r) && is_small_integer(s)) {
        // (1-x)^(s-1) expanded binomially: each moment integral is a
        // polynomial x^(r+m) * sum_k d_k x^k.
        const int si = static_cast<int>(s);
        std::vector<double> binom(si);  // C(s-1, k) * (-1)^k * inv_beta
        binom[0] = inv_beta;
        for (int k = 1; k < si; ++k) {
            binom[k] = -binom[k - 1] * (si - k) / k;
        }
        auto antiderivative = [r, si, binom](int m) {
            std::vector<double> d(si);
            for (int k = 0; k < si; ++k) {
                d[k] = binom[k] / (r + m + k);
            }
            return [r, m, d](double x) {
                double poly = 0.0;
                for (int k = static_cast<int>(d.size()) - 1; k >= 0; --k) {
                    poly = poly * x + d[k];
                }
                return std::pow(x, r + m) * poly;
            };
        };
        cf.mass = cell_from_antiderivative(antiderivative(0));
        cf.first = cell_from_antiderivative(antiderivative(1));
        cf.second = cell_from_antiderivative(antiderivative(2));
    }
    return DistributionModel("beta1", SupportInterval(0.0, 1.0), pdf, false, p, cf);
}

inline DistributionModel make_beta2(const std::map<std::string, double>& given) {
    auto p = merge_parameters("beta2", {{"r", 1.0}, {"s", 3.0}}, given);
    const double r = p.at("r");
    const double s = p.at("s");
    if (!(r > 0.0)) {
        throw std::invalid_argument("beta2: requires r > 0");
    }
    if (!(s > 2.0)) {
        throw std::invalid_argument("beta2: requires s > 2 (finite second moment)");
    }
    const double log_beta = std::lgamma(r) + std::lgamma(s) - std::lgamma(r + s);
    auto pdf = [r, s, log_beta](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp((r - 1.0) * std::log(x) - (r + s) * std::log1p(x) - log_beta);
    };
    return DistributionModel("beta2", SupportInterval(0.0, ExtendedBound::pos_infinity()),
                             pdf, false, p, CellMoments{});
}

inline DistributionModel make_gamma(const std::map<std::string, double>& given) {
    auto p = merge_parameters("gamma", {{"a", 1.0 / std::numbers::sqrt2}, {"b", 2.0}}, given);
    const double a = p.at("a");
    const double b = p.at("b");
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("gamma: requires a > 0 and b > 0");
    }
    const double log_norm = b * std::log(a) + std::lgamma(b);
    auto pdf = [a, b, log_norm](double x) {
        if (x < 0.0) return 0.0;
        if (x == 0.0) {
            if (b > 1.0) return 0.0;
            if (b == 1.0) return 1.0 / a;
            return std::numeric_limits<double>::infinity();
        }
        return std::exp((b - 1.0) * std::log(x) - x / a - log_norm);
    };
    CellMoments cf;
    if (is_small_integer(b)) {
        const int bi = static_cast<int>(b);
        TailFn t0 = [a, bi](double x) {
            if (!std::isfinite(x)) return 0.0;
            const double z = x / a;
            return std::exp(-z) * poisson_partial_sum(z, bi - 1);
        };
        TailFn t1 = [a, bi](double x) {
            if (!std::isfinite(x)) return 0.0;
            const double z = x / a;
            return a * bi * std::exp(-z) * poisson_partial_sum(z, bi);
        };
        TailFn t2 = [a, bi](double x) {
            if (!std::isfinite(x)) return 0.0;
            const double z = x / a;
            return a * a * bi * (bi + 1.0) * std::exp(-z) * poisson_partial_sum(z, bi + 1);
        };
        cf.mass = cell_from_tail(t0);
        cf.first = cell_from_tail(t1);
        cf.second = cell_from_tail(t2);
    }
    return DistributionModel("gamma", SupportInterval(0.0, ExtendedBound::pos_infinity()),
                             pdf, false, p, cf);
}

inline DistributionModel make_logistic(const std::map<std::string, double>& given) {
    auto p = merge_parameters("logistic", {{"a", std::numbers::sqrt3 / std::numbers::pi}}, given);
    const double a = p.at("a");
    if (!(a > 0.0)) {
        throw std::invalid_argument("logistic: requires a > 0");
    }
    auto pdf = [a](double x) {
        const double z = std::exp(-std::abs(x) / a);
        const double denom = 1.0 + z;
        return z / (a * denom * denom);
    };
    TailFn t0 = [a](double x) {
        if (!std::isfinite(x)) return 0.0;
        const double z = std::exp(-x / a);
        return z / (1.0 + z);
    };
    TailFn t1 = [a](double x) {
        if (!std::isfinite(x)) return 0.0;
        const double z = std::exp(-x / a);
        return x * z / (1.0 + z) + a * std::log1p(z);
    };
    CellMoments cf;
    cf.mass = cell_even(t0, 1.0);
    cf.first = cell_odd(t1);
    // The second-moment antiderivative is a dilogarithm, not elementary;
    // second moments go through quadrature.
    return DistributionModel(
        "logistic",
        SupportInterval(ExtendedBound::neg_infinity(), ExtendedBound::pos_infinity()),
        pdf, true, p, cf);
}

inline DistributionModel make_student_t(const std::map<std::string, double>& given) {
    auto p = merge_parameters("student-t", {{"k", 3.0}}, given);
    const double k = p.at("k");
    if (k != std::floor(k) || !(k >= 3.0)) {
        throw std::invalid_argument("student-t: requires integer k >= 3 (finite variance)");
    }
    const double log_norm =
        std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5 * k) - 0.5 * std::log(k * std::numbers::pi);
    auto pdf = [k, log_norm](double x) {
        return std::exp(log_norm - 0.5 * (k + 1.0) * std::log1p(x * x / k));
    };
    CellMoments cf;
    if (k == 3.0) {
        const double pi = std::numbers::pi;
        const double rt3 = std::numbers::sqrt3;
        TailFn t0 = [pi, rt3](double x) {
            if (!std::isfinite(x)) return 0.0;
            return (std::atan(rt3 / x) - rt3 * x / (3.0 + x * x)) / pi;
        };
        TailFn t1 = [pi, rt3](double x) {
            if (!std::isfinite(x)) return 0.0;
            return 3.0 * rt3 / (pi * (3.0 + x * x));
        };
        TailFn t2 = [pi, rt3](double x) {
            if (!std::isfinite(x)) return 0.0;
            return 3.0 * std::atan(rt3 / x) / pi + 3.0 * rt3 * x / (pi * (3.0 + x * x));
        };
        cf.mass = cell_even(t0, 1.0);
        cf.first = cell_odd(t1);
        cf.second = cell_even(t2, 3.0);  // E X^2 = k/(k-2) = 3
    }
    return DistributionModel(
        "student-t",
        SupportInterval(ExtendedBound::neg_infinity(), ExtendedBound::pos_infinity()),
        pdf, true, p, cf);
}

}  // namespace detail

/// The distribution families understood by catalog_make (and the CLI).
inline const std::vector<std::string>& catalog_families() {
    static const std::vector<std::string> families = {
        "normal",   "exponential", "double-exponential", "beta1",  "beta2",
        "gamma",    "logistic",    "student-t",          "uniform"};
    return families;
}

/// Construct a catalog distribution by family name. Parameters not given
/// take the family defaults; unknown names and out-of-range values raise
/// std::invalid_argument naming the violated constraint.
inline DistributionModel catalog_make(const std::string& family,
                                      const std::map<std::string, double>& parameters = {}) {
    auto no_params = [&](auto make) {
        if (!parameters.empty()) {
            throw std::invalid_argument(family + ": takes no parameters");
        }
        return make();
    };
    if (family == "normal") return no_params(detail::make_normal);
    if (family == "exponential") return no_params(detail::make_exponential);
    if (family == "double-exponential") return no_params(detail::make_double_exponential);
    if (family == "uniform") return no_params(detail::make_uniform);
    if (family == "beta1") return detail::make_beta1(parameters);
    if (family == "beta2") return detail::make_beta2(parameters);
    if (family == "gamma") return detail::make_gamma(parameters);
    if (family == "logistic") return detail::make_logistic(parameters);
    if (family == "student-t") return detail::make_student_t(parameters);
    std::string names;
    for (const auto& f : catalog_families()) {
        names += names.empty() ? f : ", " + f;
    }
    throw std::invalid_argument("unknown distribution family '" + family +
                                "' (known: " + names + ")");
}

/// Wrap a user-supplied density. All integrals go through quadrature. The
/// symmetry claim and unit normalization are spot-checked at construction.
inline DistributionModel make_custom(std::string name, SupportInterval support,
                                     std::function<double(double)> pdf,
                                     bool symmetric_about_zero) {
    if (!pdf) {
        throw std::invalid_argument("make_custom: pdf must be callable");
    }
    DistributionModel model(std::move(name), support, std::move(pdf), symmetric_about_zero,
                            {}, CellMoments{});
    const double mass = integrate([&](double x) { return model.pdf(x); },
                                  support.lower(), support.upper())
                            .value;
    if (std::abs(mass - 1.0) > 1e-10) {
        throw std::invalid_argument("make_custom: density mass over the support is " +
                                    std::to_string(mass) + ", expected 1");
    }
    if (symmetric_about_zero) {
        if (!support.symmetric_about_origin()) {
            throw std::invalid_argument(
                "make_custom: symmetric_about_zero requires a support symmetric about 0");
        }
        const double span = support.bounded() ? support.upper() : 4.0;
        for (int i = 1; i <= 7; ++i) {
            const double x = span * i / 8.0;
            const double left = model.pdf(-x);
            const double right = model.pdf(x);
            if (std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(right))) {
                throw std::invalid_argument(
                    "make_custom: density fails the symmetry spot check at x = " +
                    std::to_string(x));
            }
        }
    }
    return model;
}

/// The pushforward of `model` under y = mu + sigma x, with density
/// f((y-mu)/sigma)/sigma. Closed forms transform alongside the density.
inline DistributionModel affine_model(const DistributionModel& model, const AffineMap& map) {
    const double mu = map.mu;
    const double sigma = map.sigma;
    SupportInterval support(map(model.support().lower()), map(model.support().upper()));
    auto base_pdf = [model](double x) { return model.pdf(x); };
    auto pdf = [base_pdf, mu, sigma](double y) { return base_pdf((y - mu) / sigma) / sigma; };

    const CellMoments& base = model.closed_forms();
    CellMoments cf;
    auto pull = [mu, sigma](double y) { return (y - mu) / sigma; };
    if (base.mass) {
        cf.mass = [m = base.mass, pull](double lo, double hi) {
            return m(pull(lo), pull(hi));
        };
    }
    if (base.mass && base.first) {
        cf.first = [m = base.mass, f = base.first, pull, mu, sigma](double lo, double hi) {
            return mu * m(pull(lo), pull(hi)) + sigma * f(pull(lo), pull(hi));
        };
    }
    if (base.mass && base.first && base.second) {
        cf.second = [m = base.mass, f = base.first, s = base.second, pull, mu,
                     sigma](double lo, double hi) {
            const double ulo = pull(lo);
            const double uhi = pull(hi);
            return mu * mu * m(ulo, uhi) + 2.0 * mu * sigma * f(ulo, uhi) +
                   sigma * sigma * s(ulo, uhi);
        };
    }
    std::map<std::string, double> params = model.parameters();
    params["mu"] = mu;
    params["sigma"] = sigma;
    return DistributionModel(model.name(), support, pdf,
                             model.symmetric_about_zero() && mu == 0.0, std::move(params), cf);
}

/// Transform an optimal point set and its mean squared distance under
/// y = mu + sigma x: points map through, the distance scales by sigma^2.
inline std::pair<std::vector<double>, double> affine_pushforward(
    const std::vector<double>& points, double distortion, const AffineMap& map) {
    std::vector<double> out;
    out.reserve(points.size());
    for (double a : points) out.push_back(map(a));
    return {std::move(out), map.sigma * map.sigma * distortion};
}

}  // namespace ppts
