#pragma once

// Closed-form ridge readout: Γ = (ΦᵀΦ + λΩ)⁻¹ Φᵀ z with Ω = diag(ΦᵀΦ).

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lstcn/errors.hpp"
#include "lstcn/matrix.hpp"

namespace lstcn {

namespace detail {

// Pivots at or below this fraction of the largest diagonal entry are treated
// as zero.
inline constexpr double kRelativePivotTolerance = 1e-13;

inline double largest_diagonal(const RealMatrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, i)));
    return m;
}

/// In-place Cholesky (lower factor). Returns false on a non-positive pivot.
inline bool cholesky_factor(RealMatrix& a, double tolerance) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > tolerance)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            const double* li = &a(i, 0);
            const double* lj = &a(j, 0);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            a(i, j) = s / ljj;
        }
    }
    return true;
}

inline RealMatrix cholesky_solve(const RealMatrix& l, RealMatrix b) {
    const std::size_t n = l.rows();
    const std::size_t c = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        auto bi = b.row(i);
        for (std::size_t k = 0; k < i; ++k) {
            const double lik = l(i, k);
            const auto bk = b.row(k);
            for (std::size_t j = 0; j < c; ++j) bi[j] -= lik * bk[j];
        }
        for (std::size_t j = 0; j < c; ++j) bi[j] /= l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        auto bi = b.row(ii);
        for (std::size_t k = ii + 1; k < n; ++k) {
            const double lki = l(k, ii);
            const auto bk = b.row(k);
            for (std::size_t j = 0; j < c; ++j) bi[j] -= lki * bk[j];
        }
        for (std::size_t j = 0; j < c; ++j) bi[j] /= l(ii, ii);
    }
    return b;
}

/// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<RealMatrix> pivoted_solve(RealMatrix a, RealMatrix b, double tolerance) {
    const std::size_t n = a.rows();
    const std::size_t c = b.cols();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (!(std::abs(a(p, k)) > tolerance)) return std::nullopt;
        if (p != k) {
            std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(p).begin());
            std::swap_ranges(b.row(k).begin(), b.row(k).end(), b.row(p).begin());
        }
        const double inv = 1.0 / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) * inv;
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < c; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        auto bk = b.row(kk);
        for (std::size_t i = kk + 1; i < n; ++i) {
            const double aki = a(kk, i);
            const auto bi = b.row(i);
            for (std::size_t j = 0; j < c; ++j) bk[j] -= aki * bi[j];
        }
        for (std::size_t j = 0; j < c; ++j) bk[j] /= a(kk, kk);
    }
    return b;
}

} // namespace detail

/// Solves the symmetric system `a x = b`. Tries Cholesky first, then a
/// partially pivoted elimination; throws SingularSystemError when both fail.
inline RealMatrix solve_symmetric(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows()) {
        throw ShapeError("solve_symmetric: shape mismatch " + a.shape() + " vs " + b.shape());
    }
    const double tol = detail::kRelativePivotTolerance * detail::largest_diagonal(a);
    RealMatrix l = a;
    if (detail::cholesky_factor(l, tol)) return detail::cholesky_solve(l, b);
    if (auto x = detail::pivoted_solve(a, b, tol)) return *std::move(x);
    throw SingularSystemError(
        "ridge system (PhiᵀPhi + lambda*Omega) is singular or numerically rank deficient; "
        "raise lambda or remove constant/duplicate columns");
}

/// Ridge regression with the penalty scaled per column by diag(ΦᵀΦ).
///
/// Returns Γ of shape phi.cols() x z.cols(). A column of Φ that is entirely
/// zero gets no penalty mass, so it makes the system singular for any λ.
inline RealMatrix ridge_solve(const RealMatrix& phi, const RealMatrix& z, double lambda) {
    if (phi.rows() != z.rows()) {
        throw ShapeError("ridge_solve: shape mismatch " + phi.shape() + " vs " + z.shape());
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DataError("ridge_solve: lambda must be a finite non-negative number");
    }
    RealMatrix system = gram(phi);
    for (std::size_t i = 0; i < system.rows(); ++i) system(i, i) += lambda * system(i, i);
    return solve_symmetric(system, transpose_times(phi, z));
}

} // namespace lstcn
