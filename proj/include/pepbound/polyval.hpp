#pragma once

// Matrix polynomials P(lambda) = sum_i lambda^i A_i stored by ascending degree.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "denseig.hpp"
#include "matrix.hpp"

namespace pepbound {

class MatrixPolynomial {
public:
    MatrixPolynomial() = default;

    /// coeffs[i] multiplies lambda^i; grade is coeffs.size() - 1.
    explicit MatrixPolynomial(std::vector<ComplexMatrix> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw DimensionError("MatrixPolynomial: needs at least one coefficient");
        n_ = coeffs_.front().rows();
        for (const auto& a : coeffs_)
            if (a.rows() != n_ || a.cols() != n_) throw DimensionError("MatrixPolynomial: coefficients must all be n x n");
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t grade() const noexcept { return coeffs_.size() - 1; }
    const std::vector<ComplexMatrix>& coeffs() const noexcept { return coeffs_; }
    const ComplexMatrix& operator[](std::size_t i) const { return coeffs_.at(i); }

private:
    std::size_t n_ = 0;
    std::vector<ComplexMatrix> coeffs_;
};

/// Horner evaluation of sum lambda^i A_i.
inline ComplexMatrix eval(const MatrixPolynomial& p, cplx lambda) {
    const auto& a = p.coeffs();
    ComplexMatrix acc = a.back();
    for (std::size_t i = a.size() - 1; i-- > 0;) {
        acc *= lambda;
        acc += a[i];
    }
    return acc;
}

/// sum i lambda^(i-1) A_i
inline ComplexMatrix eval_derivative(const MatrixPolynomial& p, cplx lambda) {
    const auto& a = p.coeffs();
    const std::size_t d = p.grade();
    ComplexMatrix acc(p.n(), p.n());
    if (d == 0) return acc;
    acc = a[d] * cplx(static_cast<double>(d));
    for (std::size_t i = d - 1; i >= 1; --i) {
        acc *= lambda;
        acc += a[i] * cplx(static_cast<double>(i));
    }
    return acc;
}

/// Coefficient reversal: rev P(lambda) = lambda^d P(1/lambda).
inline MatrixPolynomial rev(const MatrixPolynomial& p) {
    std::vector<ComplexMatrix> c(p.coeffs().rbegin(), p.coeffs().rend());
    return MatrixPolynomial(std::move(c));
}

/// ||P(lambda) x||_2
inline double residual_norm(const MatrixPolynomial& p, cplx lambda, std::span<const cplx> x) {
    if (x.size() != p.n()) throw DimensionError("residual_norm: vector length differs from n");
    return norm2(eval(p, lambda) * x);
}

/// max_i ||A_i||_2
inline double max_coefficient_norm(const MatrixPolynomial& p) {
    double m = 0.0;
    for (const auto& a : p.coeffs()) m = std::max(m, spectral_norm(a));
    return m;
}

/// Divide every coefficient by max_i ||A_i||_2; returns the scaled polynomial and the factor.
inline std::pair<MatrixPolynomial, double> scale_max_norm(const MatrixPolynomial& p) {
    const double factor = max_coefficient_norm(p);
    if (factor == 0.0) throw DomainError("scale_max_norm: zero polynomial");
    std::vector<ComplexMatrix> c = p.coeffs();
    for (auto& a : c) a *= cplx{1.0 / factor};
    return {MatrixPolynomial(std::move(c)), factor};
}

/// Probabilistic regularity test: P(lambda*) nonsingular at one pseudorandom point.
inline bool probably_regular(const MatrixPolynomial& p, std::uint64_t seed = 12345) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double re = unif(rng);
    const cplx lam{re, unif(rng)};
    const ComplexMatrix v = eval(p, lam);
    const double smax = spectral_norm(v);
    return smax > 0.0 && smax * 1e-13 < smallest_singular_value(v);
}

// --- random generators --------------------------------------------------

enum class PolyKind { P1, P2, File };

struct PolySpec {
    PolyKind kind = PolyKind::P1;
    std::size_t n = 10;
    std::size_t d = 5;
    std::uint64_t seed = 0;
    std::vector<double> scales;  // per-coefficient multipliers, P2 only
    std::string path;            // PolyKind::File
};

/// Coefficient multipliers (B_0 .. B_5) of the widely-scaled test family.
inline std::vector<double> p2_scales() { return {1.0, 1e4, 1e-2, 1e5, 1.0, 1e-1}; }

/// Portable standard-normal stream: mt19937_64 uniforms through Box-Muller.
/// Each call to next_complex consumes one Box-Muller pair (re, im).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double uniform_open() {
        // 53 random bits mapped into (0, 1]
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    cplx next_complex() {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

private:
    std::mt19937_64 engine_;
};

/// The raw Gaussian family before max-norm scaling.
inline MatrixPolynomial random_polynomial_unscaled(const PolySpec& spec) {
    if (spec.kind == PolyKind::File) throw DomainError("random_polynomial: file specs are loaded, not generated");
    if (spec.n == 0 || spec.d == 0) throw DomainError("random_polynomial: n and d must be positive");
    std::vector<double> scales(spec.d + 1, 1.0);
    if (spec.kind == PolyKind::P2) {
        scales = spec.scales.empty() ? p2_scales() : spec.scales;
        if (scales.size() != spec.d + 1)
            throw DomainError("random_polynomial: P2 needs one scale per coefficient (d = 5 unless scales given)");
    }
    GaussianStream g(spec.seed);
    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(spec.d + 1);
    for (std::size_t i = 0; i <= spec.d; ++i) {
        ComplexMatrix a(spec.n, spec.n);
        for (auto& z : a.entries()) z = scales[i] * g.next_complex();
        coeffs.push_back(std::move(a));
    }
    return MatrixPolynomial(std::move(coeffs));
}

inline MatrixPolynomial random_polynomial(const PolySpec& spec) {
    return scale_max_norm(random_polynomial_unscaled(spec)).first;
}

}  // namespace pepbound
