#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppts/errors.hpp"

namespace ppts {

/// Symmetric tridiagonal matrix: diag holds the n diagonal entries, offdiag
/// the n-1 entries shared by the sub- and superdiagonal.
struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;
};

/// Solve M x = rhs by the Thomas algorithm (single forward elimination sweep
/// and back substitution, O(n), no pivoting). A pivot whose magnitude falls
/// below 1e-30 raises SingularMatrixError.
inline std::vector<double> tridiag_solve(const TridiagonalMatrix& m, std::vector<double> rhs) {
    const std::size_t n = m.diag.size();
    if (n == 0) {
        throw std::invalid_argument("tridiag_solve: empty system");
    }
    if (m.offdiag.size() + 1 != n || rhs.size() != n) {
        throw std::invalid_argument("tridiag_solve: inconsistent dimensions");
    }
    constexpr double pivot_floor = 1e-30;

    std::vector<double> upper(n - 1);  // superdiagonal after elimination
    double pivot = m.diag[0];
    if (std::abs(pivot) < pivot_floor) {
        throw SingularMatrixError("tridiag_solve: pivot underflow at row 0");
    }
    if (n > 1) {
        upper[0] = m.offdiag[0] / pivot;
    }
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] - m.offdiag[i - 1] * upper[i - 1];
        if (std::abs(pivot) < pivot_floor) {
            throw SingularMatrixError("tridiag_solve: pivot underflow at row " +
                                      std::to_string(i));
        }
        if (i < n - 1) {
            upper[i] = m.offdiag[i] / pivot;
        }
        rhs[i] = (rhs[i] - m.offdiag[i - 1] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= upper[i] * rhs[i + 1];
    }
    return rhs;
}

}  // namespace ppts
