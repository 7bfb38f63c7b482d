#pragma once

// Acute angles between vectors and the a posteriori eigenvector error bounds
// residual / separation for linearized polynomial eigenproblems.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "matrix.hpp"

namespace pepbound {

/// One row of an experiment: a computed eigenpair compared against its reference.
struct BoundRow {
    std::size_t index = 0;
    cplx lambdaExact{};
    cplx lambdaComputed{};
    double residual = 0.0;  // ||P(lambda~) x~||_2, unit x~
    double sep = 0.0;
    double sinAngle = 0.0;
    double boundKron = 0.0;
    double boundFrob = 0.0;
    double gNorm = 0.0;
    unsigned flags = 0;
};

namespace row_flags {
inline constexpr unsigned ambiguous_pairing = 1u << 0;
inline constexpr unsigned sep_zero = 1u << 1;
inline constexpr unsigned oracle_unconverged = 1u << 2;
inline constexpr unsigned numerical_failure = 1u << 3;
}  // namespace row_flags

/// sin of the acute angle between u and w, in [0, 1].
/// Computed as ||u - w (w*u)/||w||^2|| / ||u|| so near-parallel vectors keep
/// full relative accuracy.
inline double sin_acute_angle(std::span<const cplx> u, std::span<const cplx> w) {
    if (u.size() != w.size()) throw DimensionError("sin_acute_angle: length mismatch");
    const double nu = norm2(u);
    const double nw = norm2(w);
    if (nu == 0.0 || nw == 0.0) throw DomainError("sin_acute_angle: zero vector");
    // normalize first so the projection is done on unit vectors
    ComplexVector uh(u.begin(), u.end()), wh(w.begin(), w.end());
    for (auto& z : uh) z /= nu;
    for (auto& z : wh) z /= nw;
    const cplx c = dot(wh, uh);
    for (std::size_t i = 0; i < uh.size(); ++i) uh[i] -= c * wh[i];
    const double s = norm2(uh);
    return std::clamp(s, 0.0, 1.0);
}

/// sin(v, v~) <= ||L(lambda~) v~|| / (||v~|| sep)
inline double gep_eigvec_bound(double residual_l, double norm_v, double sep) {
    if (!(norm_v > 0.0)) throw DomainError("gep_eigvec_bound: normV must be positive");
    if (sep == 0.0) return std::numeric_limits<double>::infinity();
    return residual_l / (norm_v * sep);
}

/// ||g(lambda~)|| ||P(lambda~) x~|| / sep for any right-sided factorization.
inline double pep_bound_general(double g_norm, double residual_p, double sep) {
    if (g_norm < 0.0 || residual_p < 0.0 || sep < 0.0) throw DomainError("pep_bound_general: negative input");
    if (sep == 0.0) return std::numeric_limits<double>::infinity();
    return g_norm * residual_p / sep;
}

/// residual / (max(1, |lambda~|^(d-1)) sep) for block Kronecker linearizations.
inline double pep_bound_kronecker(double residual_p, cplx lambda, std::size_t d, double sep) {
    if (d == 0) throw DomainError("pep_bound_kronecker: degree must be positive");
    if (sep == 0.0) return std::numeric_limits<double>::infinity();
    const double grow = std::max(1.0, std::pow(std::abs(lambda), static_cast<double>(d - 1)));
    return residual_p / (grow * sep);
}

/// residual / (sqrt(sum_{i<d} |lambda~|^(2i)) sep) for the Frobenius companion form.
inline double pep_bound_frobenius(double residual_p, cplx lambda, std::size_t d, double sep) {
    if (d == 0) throw DomainError("pep_bound_frobenius: degree must be positive");
    if (sep == 0.0) return std::numeric_limits<double>::infinity();
    const double a = std::abs(lambda);
    // sum a^(2i) without overflow for large a: factor out the largest term
    double s = 0.0;
    if (a <= 1.0) {
        double t = 1.0;
        for (std::size_t i = 0; i < d; ++i, t *= a * a) s += t;
        return residual_p / (std::sqrt(s) * sep);
    }
    const double inv = 1.0 / (a * a);
    double t = 1.0;
    for (std::size_t i = 0; i < d; ++i, t *= inv) s += t;
    // divide by a one power at a time so a^(d-1) never overflows
    double b = residual_p / (std::sqrt(s) * sep);
    for (std::size_t i = 1; i < d; ++i) b /= a;
    return b;
}

}  // namespace pepbound
