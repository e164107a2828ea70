#pragma once

#include <stdexcept>
#include <string>

namespace ppts {

/// Base class for numerical failures (as opposed to invalid arguments, which
/// use std::invalid_argument). The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
/// Carries the best value reached and its error estimate.
class QuadratureError : public NumericalError {
  public:
    QuadratureError(const std::string& what, double best_value, double error_estimate)
        : NumericalError(what), best_value(best_value), error_estimate(error_estimate) {}

    double best_value;
    double error_estimate;
};

/// An iteration (Newton or Lloyd) failed to reach its tolerance.
class ConvergenceError : public NumericalError {
  public:
    ConvergenceError(const std::string& what, int iterations, double residual_norm)
        : NumericalError(what), iterations(iterations), residual_norm(residual_norm) {}

    int iterations;
    double residual_norm;
};

/// A Newton step could not be damped into an ordered, interior point set.
class OrderingError : public NumericalError {
  public:
    explicit OrderingError(const std::string& what) : NumericalError(what) {}
};

/// Thomas elimination hit a pivot too small to divide by.
class SingularMatrixError : public NumericalError {
  public:
    explicit SingularMatrixError(const std::string& what) : NumericalError(what) {}
};

/// A Voronoi cell carries (numerically) no probability mass, so its
/// conditional mean is undefined.
class ZeroMassCellError : public NumericalError {
  public:
    explicit ZeroMassCellError(const std::string& what) : NumericalError(what) {}
};

}  // namespace ppts
