#pragma once

// Shared helpers for the test suite: random data and independent oracles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <pepbound/denseig.hpp>
#include <pepbound/kronlin.hpp>
#include <pepbound/matrix.hpp>
#include <pepbound/polyval.hpp>

namespace testing_support {

using pepbound::ComplexMatrix;
using pepbound::ComplexVector;
using pepbound::cplx;

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> g;
    ComplexMatrix m(r, c);
    for (auto& z : m.entries()) z = {g(rng), g(rng)};
    return m;
}

inline ComplexVector random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

inline cplx random_scalar(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

/// Random polynomial drawn from a test-local stream (independent of the library generator).
inline pepbound::MatrixPolynomial random_poly(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::vector<ComplexMatrix> c;
    for (std::size_t i = 0; i <= d; ++i) c.push_back(random_matrix(rng, n, n));
    return pepbound::MatrixPolynomial(std::move(c));
}

/// Unitary factor from Gram-Schmidt on a random matrix.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
    ComplexMatrix m = random_matrix(rng, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < j; ++k) {
                cplx s{};
                for (std::size_t i = 0; i < n; ++i) s += std::conj(m(i, k)) * m(i, j);
                for (std::size_t i = 0; i < n; ++i) m(i, j) -= s * m(i, k);
            }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(m(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) m(i, j) /= nrm;
    }
    return m;
}

/// Cyclic Jacobi on a real symmetric matrix (row-major, n x n); returns eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += at(i, j) * at(i, j);
                if (i != j) off += at(i, j) * at(i, j);
            }
        if (off <= 1e-34 * total) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Smallest singular value from the eigenvalues of M*M, via the real
/// symmetric embedding [[Re, -Im], [Im, Re]] and Jacobi.
inline double jacobi_sigma_min(const ComplexMatrix& m) {
    const ComplexMatrix h = m.adjoint() * m;
    const std::size_t n = h.rows();
    std::vector<double> a(4 * n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i * 2 * n + j] = h(i, j).real();
            a[i * 2 * n + j + n] = -h(i, j).imag();
            a[(i + n) * 2 * n + j] = h(i, j).imag();
            a[(i + n) * 2 * n + j + n] = h(i, j).real();
        }
    const auto ev = jacobi_eigenvalues(std::move(a), 2 * n);
    return std::sqrt(std::max(0.0, ev.front()));
}

/// Moves the eigenvalue at diagonal position k of a generalized Schur pair to
/// the front by adjacent 2x2 swaps, then returns sigma_min of the trailing
/// block of TA - lambda TB.
inline double reordered_schur_sep(ComplexMatrix ta, ComplexMatrix tb, std::size_t k, cplx lambda) {
    const std::size_t n = ta.rows();
    for (std::size_t j = k; j-- > 0;) {
        // block rows/cols j, j+1: swap so that entry (j+1, j+1) moves to (j, j)
        const cplx s11 = ta(j, j), s12 = ta(j, j + 1), s22 = ta(j + 1, j + 1);
        const cplx t11 = tb(j, j), t12 = tb(j, j + 1), t22 = tb(j + 1, j + 1);
        const cplx m11 = t22 * s11 - s22 * t11, m12 = t22 * s12 - s22 * t12;
        cplx z0 = -m12, z1 = m11;
        double nz = std::sqrt(std::norm(z0) + std::norm(z1));
        z0 /= nz, z1 /= nz;
        // Z = [z, z_perp]
        const cplx zp0 = -std::conj(z1), zp1 = std::conj(z0);
        // q ∝ S z, fall back to T z
        cplx q0 = s11 * z0 + s12 * z1, q1 = s22 * z1;
        if (std::sqrt(std::norm(q0) + std::norm(q1)) < 1e-3 * std::abs(s22)) q0 = t11 * z0 + t12 * z1, q1 = t22 * z1;
        const double nq = std::sqrt(std::norm(q0) + std::norm(q1));
        q0 /= nq, q1 /= nq;
        const cplx qp0 = -std::conj(q1), qp1 = std::conj(q0);
        for (auto* m : {&ta, &tb}) {
            for (std::size_t i = 0; i < n; ++i) {
                const cplx a = (*m)(i, j), b = (*m)(i, j + 1);
                (*m)(i, j) = a * z0 + b * z1;
                (*m)(i, j + 1) = a * zp0 + b * zp1;
            }
            for (std::size_t c = 0; c < n; ++c) {
                const cplx a = (*m)(j, c), b = (*m)(j + 1, c);
                (*m)(j, c) = std::conj(q0) * a + std::conj(q1) * b;
                (*m)(j + 1, c) = std::conj(qp0) * a + std::conj(qp1) * b;
            }
            (*m)(j + 1, j) = 0.0;
        }
    }
    ComplexMatrix a1 = ta.block(1, 1, n - 1, n - 1);
    a1 -= tb.block(1, 1, n - 1, n - 1) * lambda;
    return jacobi_sigma_min(a1);
}

/// Cubic block Kronecker form with eps = eta = 1 and block-diagonal
/// M = diag(lambda A3 + A2, lambda A1 + A0); the d = 3 counterpart of the balanced form.
inline pepbound::BlockKroneckerForm balanced_cubic_form(const pepbound::MatrixPolynomial& p) {
    if (p.grade() != 3) throw pepbound::DimensionError("balanced_cubic_form: cubic polynomial required");
    const std::size_t n = p.n();
    pepbound::BlockKroneckerForm f;
    f.eps = f.eta = 1;
    f.n = n;
    f.M = {ComplexMatrix(2 * n, 2 * n), ComplexMatrix(2 * n, 2 * n)};
    f.M.M1.set_block(0, 0, p[3]);
    f.M.M0c.set_block(0, 0, p[2]);
    f.M.M1.set_block(n, n, p[1]);
    f.M.M0c.set_block(n, n, p[0]);
    f.rowPerm = f.colPerm = pepbound::identity_permutation(3);
    return f;
}

inline double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_support
