#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lvbc/error.hpp"

namespace lvbc {

/// Thomas algorithm for a tridiagonal system.
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored. The solution overwrites `rhs`.
/// `scratch` must hold n doubles. No pivoting: callers pass diagonally
/// dominant matrices (diffusion operators, Newton Jacobians near a solution).
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs, std::span<double> scratch) {
    const std::size_t n = diag.size();
    double denom = diag[0];
    if (denom == 0.0) fail(ErrorKind::NonConvergence, "singular tridiagonal system (zero pivot in row 0)");
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        if (denom == 0.0) fail(ErrorKind::NonConvergence, "singular tridiagonal system (zero pivot)");
        scratch[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

/// Owning tridiagonal matrix with a reusable scratch buffer.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;
    mutable std::vector<double> scratch;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), scratch(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    void solve(std::span<double> rhs) const { solve_tridiagonal(lower, diag, upper, rhs, scratch); }

    /// Solves with the transposed matrix (sub- and super-diagonals swapped).
    void solve_transposed(std::span<double> rhs) const {
        const std::size_t n = size();
        std::vector<double> lt(n, 0.0), ut(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            lt[i + 1] = upper[i];
            ut[i] = lower[i + 1];
        }
        solve_tridiagonal(lt, diag, ut, rhs, scratch);
    }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += lower[i] * x[i - 1];
            if (i + 1 < n) v += upper[i] * x[i + 1];
            y[i] = v;
        }
    }
};

}  // namespace lvbc
