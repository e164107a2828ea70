#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ppts {

/// A point of the extended real line. Finite values must be actual numbers;
/// the two infinities are represented by IEEE infinities. NaN is rejected.
struct ExtendedBound {
    double value;

    ExtendedBound(double v) : value(v) {
        if (std::isnan(v)) {
            throw std::invalid_argument("ExtendedBound: NaN is not a valid bound");
        }
    }

    static ExtendedBound neg_infinity() {
        return ExtendedBound(-std::numeric_limits<double>::infinity());
    }
    static ExtendedBound pos_infinity() {
        return ExtendedBound(std::numeric_limits<double>::infinity());
    }

    bool finite() const { return std::isfinite(value); }
};

inline bool operator==(ExtendedBound a, ExtendedBound b) { return a.value == b.value; }
inline bool operator<(ExtendedBound a, ExtendedBound b) { return a.value < b.value; }
inline bool operator<=(ExtendedBound a, ExtendedBound b) { return a.value <= b.value; }

/// Interval (lower, upper) of the extended real line with lower < upper.
/// Used as the support of a distribution; points of interest are always
/// interior, so the interval is treated as open at both ends.
class SupportInterval {
  public:
    SupportInterval(ExtendedBound lower, ExtendedBound upper)
        : lower_(lower), upper_(upper) {
        if (!(lower_.value < upper_.value)) {
            throw std::invalid_argument("SupportInterval: lower bound must be below upper bound");
        }
    }

    double lower() const { return lower_.value; }
    double upper() const { return upper_.value; }
    bool bounded() const { return lower_.finite() && upper_.finite(); }
    bool interior(double x) const { return lower_.value < x && x < upper_.value; }

    /// True when the interval is (-L, L) shaped around the origin.
    bool symmetric_about_origin() const {
        return lower_.value == -upper_.value;
    }

  private:
    ExtendedBound lower_;
    ExtendedBound upper_;
};

/// Order-preserving map x -> mu + sigma * x with sigma > 0.
struct AffineMap {
    double mu = 0.0;
    double sigma = 1.0;

    AffineMap(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
        if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
            throw std::invalid_argument("AffineMap: requires finite mu and sigma > 0");
        }
    }

    double operator()(double x) const { return mu + sigma * x; }
    double inverse(double y) const { return (y - mu) / sigma; }
};

}  // namespace ppts
