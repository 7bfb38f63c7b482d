#pragma once

// Dense complex eigen-engine: Hessenberg-triangular reduction and single-shift
// QZ, inverse iteration, Householder completions, bisection SVD, separation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace pepbound {

struct InfiniteEigenvalue : DomainError {
    using DomainError::DomainError;
};
struct NotAnEigenvector : DomainError {
    using DomainError::DomainError;
};

namespace detail {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

/// Plane rotation G = [[c, s], [-conj(s), c]] with G (f, g)^T = (r, 0)^T.
struct Givens {
    double c = 1.0;
    cplx s{};
    cplx r{};
};

inline Givens make_givens(cplx f, cplx g) {
    if (g == cplx{}) return {1.0, cplx{}, f};
    const double ag = std::abs(g);
    if (f == cplx{}) return {0.0, std::conj(g) / ag, cplx{ag}};
    const double af = std::abs(f);
    const double nrm = std::hypot(af, ag);
    const cplx phase = f / af;
    return {af / nrm, phase * std::conj(g) / nrm, phase * nrm};
}

/// rows p, q <- G * rows p, q over columns [c0, c1)
inline void rotate_rows(ComplexMatrix& m, std::size_t p, std::size_t q, const Givens& g, std::size_t c0,
                        std::size_t c1) {
    for (std::size_t j = c0; j < c1; ++j) {
        const cplx x = m(p, j);
        const cplx y = m(q, j);
        m(p, j) = g.c * x + g.s * y;
        m(q, j) = -std::conj(g.s) * x + g.c * y;
    }
}

/// Right rotation that annihilates column `q` of some row against pivot column
/// `p`: col_p <- c col_p + s col_q, col_q <- -conj(s) col_p + c col_q over rows [r0, r1).
inline void rotate_cols(ComplexMatrix& m, std::size_t p, std::size_t q, const Givens& g, std::size_t r0,
                        std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
        const cplx x = m(i, p);
        const cplx y = m(i, q);
        m(i, p) = g.c * x + g.s * y;
        m(i, q) = -std::conj(g.s) * x + g.c * y;
    }
}

/// Q <- Q G^* after a left rotation of rows p, q.
inline void accumulate_left(ComplexMatrix& q, std::size_t p, std::size_t r, const Givens& g) {
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const cplx x = q(i, p);
        const cplx y = q(i, r);
        q(i, p) = g.c * x + std::conj(g.s) * y;
        q(i, r) = -g.s * x + g.c * y;
    }
}

/// Hermitian reflector I - 2 w w^* / (w^* w) mapping x onto beta e_1.
struct Reflector {
    ComplexVector w;
    double w_norm2 = 0.0;  // w^* w; zero means identity
    cplx beta{};
};

inline Reflector make_reflector(std::span<const cplx> x) {
    Reflector h;
    h.w.assign(x.begin(), x.end());
    const double sigma = norm2(x);
    if (sigma == 0.0) return h;
    const cplx phase = x[0] == cplx{} ? cplx{1.0} : x[0] / std::abs(x[0]);
    h.beta = -phase * sigma;
    h.w[0] -= h.beta;
    for (const auto& z : h.w) h.w_norm2 += std::norm(z);
    return h;
}

/// rows [r0, r0+len) of columns [c0, c1) <- H * (that block)
inline void reflect_rows(ComplexMatrix& m, const Reflector& h, std::size_t r0, std::size_t c0, std::size_t c1) {
    if (h.w_norm2 == 0.0) return;
    const double tau = 2.0 / h.w_norm2;
    for (std::size_t j = c0; j < c1; ++j) {
        cplx s{};
        for (std::size_t k = 0; k < h.w.size(); ++k) s += std::conj(h.w[k]) * m(r0 + k, j);
        s *= tau;
        for (std::size_t k = 0; k < h.w.size(); ++k) m(r0 + k, j) -= h.w[k] * s;
    }
}

/// columns [c0, c0+len) of rows [r0, r1) <- (that block) * H
inline void reflect_cols(ComplexMatrix& m, const Reflector& h, std::size_t c0, std::size_t r0, std::size_t r1) {
    if (h.w_norm2 == 0.0) return;
    const double tau = 2.0 / h.w_norm2;
    for (std::size_t i = r0; i < r1; ++i) {
        cplx s{};
        for (std::size_t k = 0; k < h.w.size(); ++k) s += m(i, c0 + k) * h.w[k];
        s *= tau;
        for (std::size_t k = 0; k < h.w.size(); ++k) m(i, c0 + k) -= s * std::conj(h.w[k]);
    }
}

/// Number of singular values of the real bidiagonal (d, e) strictly below x,
/// from a Sturm count on the zero-diagonal Golub-Kahan tridiagonal.
inline std::size_t bidiagonal_count_below(std::span<const double> d, std::span<const double> e, double x) {
    const std::size_t n = d.size();
    std::size_t negatives = 0;
    double q = -x;
    const double tiny = std::numeric_limits<double>::min();
    if (q < 0) ++negatives;
    for (std::size_t k = 1; k < 2 * n; ++k) {
        const double b = (k % 2 == 1) ? d[k / 2] : e[k / 2 - 1];
        if (q == 0.0) q = -tiny;
        q = -x - (b * b) / q;
        if (q < 0) ++negatives;
    }
    return negatives - n;
}

/// Reduce m (any shape) to a real nonnegative upper bidiagonal with the same
/// singular values. Returns (diagonal, superdiagonal) of length k = min(rows, cols).
inline std::pair<std::vector<double>, std::vector<double>> bidiagonalize(ComplexMatrix m) {
    if (m.rows() < m.cols()) m = m.adjoint();
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::vector<double> d(cols, 0.0);
    std::vector<double> e(cols > 0 ? cols - 1 : 0, 0.0);
    for (std::size_t k = 0; k < cols; ++k) {
        ComplexVector x(rows - k);
        for (std::size_t i = k; i < rows; ++i) x[i - k] = m(i, k);
        const Reflector hl = make_reflector(x);
        reflect_rows(m, hl, k, k, cols);
        d[k] = std::abs(m(k, k));
        if (k + 1 < cols) {
            ComplexVector y(cols - k - 1);
            // reflector of conj(row) applied from the right zeroes m(k, k+2:)
            for (std::size_t j = k + 1; j < cols; ++j) y[j - k - 1] = std::conj(m(k, j));
            reflect_cols(m, make_reflector(y), k + 1, k, rows);
            e[k] = std::abs(m(k, k + 1));
        }
    }
    return {d, e};
}

/// k-th smallest (0-based) singular value of the bidiagonal by bisection.
inline double bidiagonal_singular_value(std::span<const double> d, std::span<const double> e, std::size_t k) {
    double hi = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double left = i > 0 ? e[i - 1] : 0.0;
        const double right = i < e.size() ? e[i] : 0.0;
        hi = std::max(hi, d[i] + std::max(left, right) + left + right);
    }
    if (hi == 0.0) return 0.0;
    hi *= 1.0 + 4 * kUlp;
    double lo = 0.0;
    for (int it = 0; it < 2000; ++it) {
        const double mid = lo > 0.0 && hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (bidiagonal_count_below(d, e, mid) > k)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 2 * kUlp * hi) break;
        if (lo == 0.0 && hi < std::numeric_limits<double>::min()) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// All singular values in ascending order.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
    if (m.empty()) return {};
    const double scale = max_abs(m);
    if (scale == 0.0) return std::vector<double>(std::min(m.rows(), m.cols()), 0.0);
    ComplexMatrix s = m;
    s *= cplx{1.0 / scale};
    auto [d, e] = detail::bidiagonalize(std::move(s));
    std::vector<double> out(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) out[k] = scale * detail::bidiagonal_singular_value(d, e, k);
    return out;
}

/// sigma_min; +infinity for an empty matrix (trailing block of a 1x1 pencil).
inline double smallest_singular_value(const ComplexMatrix& m) {
    if (m.empty()) return std::numeric_limits<double>::infinity();
    const double scale = max_abs(m);
    if (scale == 0.0) return 0.0;
    ComplexMatrix s = m;
    s *= cplx{1.0 / scale};
    auto [d, e] = detail::bidiagonalize(std::move(s));
    return scale * detail::bidiagonal_singular_value(d, e, 0);
}

inline double spectral_norm(const ComplexMatrix& m) {
    if (m.empty()) return 0.0;
    const double scale = max_abs(m);
    if (scale == 0.0) return 0.0;
    ComplexMatrix s = m;
    s *= cplx{1.0 / scale};
    auto [d, e] = detail::bidiagonalize(std::move(s));
    return scale * detail::bidiagonal_singular_value(d, e, d.size() - 1);
}

/// N x N unitary whose first column is exactly u (a unit vector).
inline ComplexMatrix unitary_completion(std::span<const cplx> u) {
    const std::size_t n = u.size();
    if (n == 0) throw DomainError("unitary_completion: empty vector");
    const double nu = norm2(u);
    if (nu == 0.0) throw DomainError("unitary_completion: zero vector");
    if (std::abs(nu - 1.0) > 1e-12) throw DomainError("unitary_completion: vector is not unit length");
    const detail::Reflector h = detail::make_reflector(u);
    ComplexMatrix w = ComplexMatrix::identity(n);
    detail::reflect_rows(w, h, 0, 0, n);
    // H u = beta e1 with |beta| = 1, so H e1 = u / beta
    const cplx beta = h.w_norm2 == 0.0 ? cplx{1.0} : h.beta;
    for (std::size_t i = 0; i < n; ++i) w(i, 0) *= beta;
    if (h.w_norm2 == 0.0) w.set_col(0, u);
    return w;
}

/// Q, Z unitary and TA, TB upper triangular with A = Q TA Z^*, B = Q TB Z^*.
struct GeneralizedSchur {
    ComplexMatrix Q;
    ComplexMatrix Z;
    ComplexMatrix TA;
    ComplexMatrix TB;
    double normA = 0.0;  // Frobenius norms of the input pencil
    double normB = 0.0;
    int iterations = 0;
};

/// Diagonal pair of the Schur form; `infinite` when the TB entry is negligible.
struct GeneralizedEigenvalue {
    cplx alpha{};  // TA(i, i)
    cplx beta{};   // TB(i, i)
    bool infinite = false;
    cplx lambda{};

    double magnitude() const {
        return infinite ? std::numeric_limits<double>::infinity() : std::abs(lambda);
    }
};

namespace detail {

/// Single-shift QZ on an upper Hessenberg H / upper triangular T pair.
inline int qz_iterate(ComplexMatrix& H, ComplexMatrix& T, ComplexMatrix& Q, ComplexMatrix& Z, double normH,
                      double normT) {
    const std::size_t n = H.rows();
    if (n <= 1) return 0;
    constexpr double deflate_tol = 1e-14;
    const double h_floor = kUlp * normH;
    const double t_tol = kUlp * std::max(normT, std::numeric_limits<double>::min());
    const int max_iter = static_cast<int>(60 * n);
    int iter = 0;
    int since_deflation = 0;
    std::size_t ihi = n - 1;

    while (ihi > 0) {
        std::size_t ilo = 0;
        for (std::size_t k = ihi; k >= 1; --k) {
            const double local = std::abs(H(k - 1, k - 1)) + std::abs(H(k, k));
            if (std::abs(H(k, k - 1)) <= std::max(deflate_tol * local, h_floor)) {
                H(k, k - 1) = cplx{};
                ilo = k;
                break;
            }
        }
        if (ilo == ihi) {
            --ihi;
            since_deflation = 0;
            continue;
        }

        // zero on T's diagonal: push it to the bottom and deflate an infinite eigenvalue
        std::optional<std::size_t> zero_at;
        for (std::size_t j = ilo; j <= ihi; ++j)
            if (std::abs(T(j, j)) <= t_tol) {
                T(j, j) = cplx{};
                zero_at = j;
                break;
            }
        if (zero_at) {
            std::size_t j = *zero_at;
            if (j == ilo && j < ihi) {
                const Givens g = make_givens(H(j, j), H(j + 1, j));
                rotate_rows(H, j, j + 1, g, j, n);
                rotate_rows(T, j, j + 1, g, j, n);
                accumulate_left(Q, j, j + 1, g);
                H(j + 1, j) = cplx{};
                T(j + 1, j) = cplx{};
                continue;
            }
            for (std::size_t k = j; k < ihi; ++k) {
                const Givens gl = make_givens(T(k, k + 1), T(k + 1, k + 1));
                rotate_rows(T, k, k + 1, gl, k + 1, n);
                rotate_rows(H, k, k + 1, gl, k - 1, n);
                accumulate_left(Q, k, k + 1, gl);
                T(k + 1, k + 1) = cplx{};
                const Givens gr = make_givens(H(k + 1, k), H(k + 1, k - 1));
                rotate_cols(H, k, k - 1, gr, 0, k + 2);
                rotate_cols(T, k, k - 1, gr, 0, k + 1);
                rotate_cols(Z, k, k - 1, gr, 0, n);
                H(k + 1, k - 1) = cplx{};
            }
            const Givens g = make_givens(H(ihi, ihi), H(ihi, ihi - 1));
            rotate_cols(H, ihi, ihi - 1, g, 0, ihi + 1);
            rotate_cols(T, ihi, ihi - 1, g, 0, ihi + 1);
            rotate_cols(Z, ihi, ihi - 1, g, 0, n);
            H(ihi, ihi - 1) = cplx{};
            T(ihi, ihi - 1) = cplx{};
            continue;
        }

        if (++iter > max_iter) throw NonConvergence("generalized_schur: QZ iteration cap reached");
        ++since_deflation;

        cplx shift;
        if (since_deflation % 10 == 0) {
            // exceptional shift
            shift = (H(ihi, ihi) + std::abs(H(ihi, ihi - 1)) * std::polar(1.0, 0.7 * since_deflation)) / T(ihi, ihi);
        } else {
            const cplx t11 = T(ihi - 1, ihi - 1), t12 = T(ihi - 1, ihi), t22 = T(ihi, ihi);
            const cplx h11 = H(ihi - 1, ihi - 1), h12 = H(ihi - 1, ihi);
            const cplx h21 = H(ihi, ihi - 1), h22 = H(ihi, ihi);
            const cplx c22 = h22 / t22;
            const cplx c21 = h21 / t22;
            const cplx c11 = h11 / t11 - t12 * h21 / (t11 * t22);
            const cplx c12 = h12 / t11 - t12 * h22 / (t11 * t22);
            const cplx p = 0.5 * (c11 - c22);
            const cplx disc = std::sqrt(p * p + c12 * c21);
            const cplx big = std::abs(p + disc) >= std::abs(p - disc) ? p + disc : p - disc;
            shift = big == cplx{} ? c22 : c22 - c12 * c21 / big;
        }

        {
            const Givens g = make_givens(H(ilo, ilo) - shift * T(ilo, ilo), H(ilo + 1, ilo));
            rotate_rows(H, ilo, ilo + 1, g, ilo, n);
            rotate_rows(T, ilo, ilo + 1, g, ilo, n);
            accumulate_left(Q, ilo, ilo + 1, g);
        }
        for (std::size_t k = ilo; k < ihi; ++k) {
            const Givens gr = make_givens(T(k + 1, k + 1), T(k + 1, k));
            rotate_cols(H, k + 1, k, gr, 0, std::min(k + 3, ihi + 1));
            rotate_cols(T, k + 1, k, gr, 0, k + 2);
            rotate_cols(Z, k + 1, k, gr, 0, n);
            T(k + 1, k) = cplx{};
            if (k + 1 < ihi) {
                const Givens gl = make_givens(H(k + 1, k), H(k + 2, k));
                rotate_rows(H, k + 1, k + 2, gl, k, n);
                rotate_rows(T, k + 1, k + 2, gl, k + 1, n);
                accumulate_left(Q, k + 1, k + 2, gl);
                H(k + 2, k) = cplx{};
            }
        }
    }
    return iter;
}

}  // namespace detail

/// Generalized Schur decomposition of the pencil A - lambda B.
inline GeneralizedSchur generalized_schur(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (!A.square() || !B.square() || A.rows() != B.rows())
        throw DimensionError("generalized_schur: A and B must be square and of equal size");
    const std::size_t n = A.rows();
    GeneralizedSchur s{ComplexMatrix::identity(n), ComplexMatrix::identity(n), A, B, frobenius_norm(A),
                       frobenius_norm(B), 0};
    ComplexMatrix& H = s.TA;
    ComplexMatrix& T = s.TB;

    // B = QR
    for (std::size_t k = 0; k + 1 < n; ++k) {
        ComplexVector x(n - k);
        for (std::size_t i = k; i < n; ++i) x[i - k] = T(i, k);
        const detail::Reflector h = detail::make_reflector(x);
        detail::reflect_rows(T, h, k, k, n);
        detail::reflect_rows(H, h, k, 0, n);
        detail::reflect_cols(s.Q, h, k, 0, n);
        for (std::size_t i = k + 1; i < n; ++i) T(i, k) = cplx{};
    }
    // A to Hessenberg, keeping B triangular
    for (std::size_t j = 0; j + 2 < n; ++j) {
        for (std::size_t i = n - 1; i >= j + 2; --i) {
            const detail::Givens gl = detail::make_givens(H(i - 1, j), H(i, j));
            detail::rotate_rows(H, i - 1, i, gl, j, n);
            detail::rotate_rows(T, i - 1, i, gl, i - 1, n);
            detail::accumulate_left(s.Q, i - 1, i, gl);
            H(i, j) = cplx{};
            const detail::Givens gr = detail::make_givens(T(i, i), T(i, i - 1));
            detail::rotate_cols(H, i, i - 1, gr, 0, n);
            detail::rotate_cols(T, i, i - 1, gr, 0, i + 1);
            detail::rotate_cols(s.Z, i, i - 1, gr, 0, n);
            T(i, i - 1) = cplx{};
        }
    }
    s.iterations = detail::qz_iterate(H, T, s.Q, s.Z, frobenius_norm(H), frobenius_norm(T));
    return s;
}

inline std::vector<GeneralizedEigenvalue> eigenvalues(const GeneralizedSchur& s) {
    const std::size_t n = s.TA.rows();
    const double inf_tol = 1e-14 * std::max(s.normB, frobenius_norm(s.TB));
    std::vector<GeneralizedEigenvalue> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = out[i];
        e.alpha = s.TA(i, i);
        e.beta = s.TB(i, i);
        e.infinite = std::abs(e.beta) <= inf_tol;
        e.lambda = e.infinite ? cplx{std::numeric_limits<double>::infinity(), 0.0} : e.alpha / e.beta;
    }
    return out;
}

namespace detail {

/// In-place LU with partial pivoting; returns false on an exactly zero pivot.
inline bool lu_factor(ComplexMatrix& m, std::vector<std::size_t>& piv) {
    const std::size_t n = m.rows();
    piv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > best) {
                best = std::abs(m(i, k));
                p = i;
            }
        piv[k] = p;
        if (best == 0.0 || !std::isfinite(best)) return false;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
        const cplx inv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = m(i, k) * inv;
            m(i, k) = f;
            if (f == cplx{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return true;
}

inline void lu_solve_inplace(const ComplexMatrix& lu, const std::vector<std::size_t>& piv, ComplexVector& b) {
    const std::size_t n = lu.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
        for (std::size_t i = k + 1; i < n; ++i) b[i] -= lu(i, k) * b[k];
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) b[k] -= lu(k, j) * b[j];
        b[k] /= lu(k, k);
    }
}

inline ComplexMatrix shifted(const ComplexMatrix& A, const ComplexMatrix& B, cplx lambda) {
    ComplexMatrix m = A;
    for (std::size_t k = 0; k < m.entries().size(); ++k) m.entries()[k] -= lambda * B.entries()[k];
    return m;
}

}  // namespace detail

/// Unit vector v approximately in the null space of A - lambda B.
inline ComplexVector inverse_iteration_vector(const ComplexMatrix& A, const ComplexMatrix& B, cplx lambda,
                                              int steps = 3) {
    if (!A.square() || !B.square() || A.rows() != B.rows())
        throw DimensionError("inverse_iteration_vector: A and B must be square and of equal size");
    const std::size_t n = A.rows();
    std::vector<std::size_t> piv;
    ComplexMatrix lu = detail::shifted(A, B, lambda);
    if (!detail::lu_factor(lu, piv)) {
        const cplx nudged = lambda + 1e-13 * (1.0 + std::abs(lambda));
        lu = detail::shifted(A, B, nudged);
        if (!detail::lu_factor(lu, piv)) throw Breakdown("inverse_iteration_vector: singular shifted pencil");
    }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    ComplexVector v(n);
    for (auto& z : v) {
        const double re = unif(rng);
        z = cplx{re, unif(rng)};
    }
    v = normalized(v);
    for (int it = 0; it < steps; ++it) {
        detail::lu_solve_inplace(lu, piv, v);
        const double nv = norm2(v);
        if (!(nv > 0.0) || !std::isfinite(nv)) throw Breakdown("inverse_iteration_vector: iterate lost finiteness");
        for (auto& z : v) z /= nv;
    }
    return v;
}

struct SepResult {
    double sep = 0.0;
    cplx lambdaUsed{};
    cplx lambdaExact{};  // Rayleigh quotient of the supplied eigenvector
    bool sepUnderflow = false;
};

/// sep(lambda~, (A1, B1)) for the deflation of (A, B) along the eigenvector v.
/// Q = [q1 Q2], Z = [z1 Z2] are Householder completions; the value is
/// independent of the completion because sigma_min is unitarily invariant.
inline SepResult separation(const ComplexMatrix& A, const ComplexMatrix& B, std::span<const cplx> v,
                            cplx lambda_tilde) {
    const std::size_t n = A.rows();
    if (!A.square() || !B.square() || B.rows() != n || v.size() != n)
        throw DimensionError("separation: inconsistent dimensions");
    const ComplexVector z1 = normalized(v);
    const ComplexVector bz = B * std::span<const cplx>(z1);
    const ComplexVector az = A * std::span<const cplx>(z1);
    const double nbz = norm2(bz);
    const double normA = frobenius_norm(A);
    const double normB = frobenius_norm(B);
    if (nbz <= 1e-14 * normB) throw InfiniteEigenvalue("separation: B v vanishes (infinite eigenvalue)");
    const cplx lambda0 = dot(bz, az) / (nbz * nbz);
    ComplexVector res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = az[i] - lambda0 * bz[i];
    if (norm2(res) > 1e-8 * std::max(normA, normB * std::abs(lambda0)))
        throw NotAnEigenvector("separation: supplied vector is not an eigenvector");

    SepResult out;
    out.lambdaUsed = lambda_tilde;
    out.lambdaExact = lambda0;
    if (n == 1) {
        out.sep = std::numeric_limits<double>::infinity();
        return out;
    }
    ComplexVector q1(n);
    for (std::size_t i = 0; i < n; ++i) q1[i] = bz[i] / nbz;
    const ComplexMatrix Qc = unitary_completion(q1);
    const ComplexMatrix Zc = unitary_completion(z1);
    const ComplexMatrix Q2 = Qc.block(0, 1, n, n - 1);
    const ComplexMatrix Z2 = Zc.block(0, 1, n, n - 1);
    const ComplexMatrix K = Q2.adjoint() * detail::shifted(A, B, lambda_tilde) * Z2;
    out.sep = smallest_singular_value(K);
    out.sepUnderflow = !(out.sep > 1e-15 * frobenius_norm(K));
    return out;
}

}  // namespace pepbound
