#pragma once

// Block Kronecker linearizations
//
//   L(lambda) = [ M(lambda)          L_eta(lambda)^T (x) I_n ]
//               [ L_eps(lambda) (x) I_n          0           ]
//
// together with the structured blocks they are built from, their right-sided
// factorizations L(lambda) H(lambda) = g(lambda) (x) P(lambda), and the
// recovery of polynomial eigenvectors from pencil eigenvectors.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "denseig.hpp"
#include "matrix.hpp"
#include "polyval.hpp"

namespace pepbound {

struct NoMatch : Error {
    using Error::Error;
};

/// The pencil A - lambda B.
struct Pencil {
    ComplexMatrix A;
    ComplexMatrix B;

    std::size_t size() const noexcept { return A.rows(); }
    ComplexMatrix eval(cplx lambda) const {
        ComplexMatrix m = A;
        m -= B * lambda;
        return m;
    }
};

/// M(lambda) = lambda M1 + M0c, an (eta+1) x (eps+1) grid of n x n blocks.
struct MPencil {
    ComplexMatrix M1;
    ComplexMatrix M0c;

    ComplexMatrix eval(cplx lambda) const {
        ComplexMatrix m = M0c;
        m += M1 * lambda;
        return m;
    }
};

enum class LinearizationLabel { L1, L2, L3, Custom };

inline std::string to_string(LinearizationLabel l) {
    switch (l) {
        case LinearizationLabel::L1: return "L1";
        case LinearizationLabel::L2: return "L2";
        case LinearizationLabel::L3: return "L3";
        case LinearizationLabel::Custom: return "custom";
    }
    return "custom";
}

/// Block Kronecker pencil description. Block row i of the assembled pencil is
/// block row rowPerm[i] of the unpermuted core; likewise for columns.
struct BlockKroneckerForm {
    std::size_t eps = 0;
    std::size_t eta = 0;
    std::size_t n = 0;
    MPencil M;
    std::vector<std::size_t> rowPerm;
    std::vector<std::size_t> colPerm;
    LinearizationLabel label = LinearizationLabel::Custom;

    std::size_t degree() const noexcept { return eps + eta + 1; }
};

inline std::vector<std::size_t> identity_permutation(std::size_t d) {
    std::vector<std::size_t> p(d);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

namespace detail {

inline ComplexMatrix scaled_identity(std::size_t n, cplx s) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

inline void put_scaled_identity(ComplexMatrix& m, std::size_t block_row, std::size_t block_col, std::size_t n,
                                cplx s) {
    for (std::size_t i = 0; i < n; ++i) m(block_row * n + i, block_col * n + i) += s;
}

/// L_k (x) I_n split as constant + lambda * linear coefficients.
inline std::pair<ComplexMatrix, ComplexMatrix> lk_coefficients(std::size_t k, std::size_t n) {
    ComplexMatrix c0(k * n, (k + 1) * n), c1(k * n, (k + 1) * n);
    for (std::size_t j = 0; j < k; ++j) {
        put_scaled_identity(c0, j, j, n, -1.0);
        put_scaled_identity(c1, j, j + 1, n, 1.0);
    }
    return {c0, c1};
}

inline void check_perm(const std::vector<std::size_t>& p, std::size_t d, const char* what) {
    if (p.size() != d) throw DimensionError(std::string(what) + ": permutation has wrong length");
    std::vector<bool> seen(d, false);
    for (auto v : p) {
        if (v >= d || seen[v]) throw DimensionError(std::string(what) + ": not a permutation");
        seen[v] = true;
    }
}

}  // namespace detail

/// Lambda_k(lambda) (x) I_n = [lambda^k I; ...; lambda I; I]
inline ComplexMatrix lambda_block(std::size_t k, cplx lambda, std::size_t n) {
    ComplexMatrix m((k + 1) * n, n);
    cplx power{1.0};
    for (std::size_t j = k + 1; j-- > 0;) {
        detail::put_scaled_identity(m, j, 0, n, power);
        power *= lambda;
    }
    return m;
}

/// L_k(lambda) (x) I_n: -I on the block diagonal, lambda I on the block superdiagonal.
/// k = 0 yields an empty 0 x n matrix.
inline ComplexMatrix lk_block(std::size_t k, cplx lambda, std::size_t n) {
    auto [c0, c1] = detail::lk_coefficients(k, n);
    c0 += c1 * lambda;
    return c0;
}

/// R_k(lambda): block (i, j) = lambda^(i-j) I for j <= i (0-based), kn x (k+1)n.
inline ComplexMatrix r_block(std::size_t k, cplx lambda, std::size_t n) {
    ComplexMatrix m(k * n, (k + 1) * n);
    for (std::size_t i = 0; i < k; ++i) {
        cplx power{1.0};
        for (std::size_t j = i + 1; j-- > 0;) {
            detail::put_scaled_identity(m, i, j, n, power);
            power *= lambda;
        }
    }
    return m;
}

/// S_k(lambda): block (i, i+m) = lambda^(k-m) I for m >= 1, zero elsewhere (first column zero).
inline ComplexMatrix s_block(std::size_t k, cplx lambda, std::size_t n) {
    ComplexMatrix m(k * n, (k + 1) * n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j <= k; ++j)
            detail::put_scaled_identity(m, i, j, n, std::pow(lambda, static_cast<int>(k - (j - i))));
    return m;
}

/// The canonical solution M_0: top block row (lambda A_d + A_{d-1}, A_{d-2}, ..., A_eta),
/// last block column continuing down with A_{eta-1}, ..., A_0.
inline MPencil m0_pencil(const MatrixPolynomial& p, std::size_t eps, std::size_t eta) {
    const std::size_t d = p.grade();
    if (eps + eta + 1 != d) throw DimensionError("m0_pencil: eps + eta + 1 must equal the grade");
    const std::size_t n = p.n();
    MPencil m{ComplexMatrix((eta + 1) * n, (eps + 1) * n), ComplexMatrix((eta + 1) * n, (eps + 1) * n)};
    m.M1.set_block(0, 0, p[d]);
    m.M0c.set_block(0, 0, p[d - 1]);
    for (std::size_t j = 1; j <= eps; ++j) m.M0c.set_block(0, j * n, p[d - 1 - j]);
    for (std::size_t i = 1; i <= eta; ++i) m.M0c.set_block(i * n, eps * n, p[eta - i]);
    return m;
}

/// M_0 + B (L_eps (x) I_n) + (L_eta^T (x) I_n) C.
inline MPencil make_m_pencil(const MatrixPolynomial& p, std::size_t eps, std::size_t eta, const ComplexMatrix& bmat,
                             const ComplexMatrix& cmat) {
    const std::size_t n = p.n();
    if (bmat.rows() != (eta + 1) * n || bmat.cols() != eps * n)
        throw DimensionError("make_m_pencil: B must be (eta+1)n x (eps n)");
    if (cmat.rows() != eta * n || cmat.cols() != (eps + 1) * n)
        throw DimensionError("make_m_pencil: C must be (eta n) x (eps+1)n");
    MPencil m = m0_pencil(p, eps, eta);
    if (eps > 0) {
        auto [l0, l1] = detail::lk_coefficients(eps, n);
        m.M0c += bmat * l0;
        m.M1 += bmat * l1;
    }
    if (eta > 0) {
        auto [l0, l1] = detail::lk_coefficients(eta, n);
        m.M0c += l0.transpose() * cmat;
        m.M1 += l1.transpose() * cmat;
    }
    return m;
}

/// Expands (Lambda_eta^T (x) I) M(lambda) (Lambda_eps (x) I) into grade eps+eta+1 coefficients
/// by multiplying the three matrix polynomials coefficient-wise.
inline MatrixPolynomial induced_polynomial(const MPencil& m, std::size_t eps, std::size_t eta) {
    const std::size_t n = m.M1.cols() / (eps + 1);
    if (m.M1.rows() != (eta + 1) * n || m.M1.cols() != (eps + 1) * n || m.M0c.rows() != m.M1.rows() ||
        m.M0c.cols() != m.M1.cols())
        throw DimensionError("induced_polynomial: M has inconsistent block shape");
    using PolyMat = std::vector<ComplexMatrix>;  // ascending coefficient list
    auto multiply = [](const PolyMat& a, const PolyMat& b) {
        PolyMat c(a.size() + b.size() - 1, ComplexMatrix(a.front().rows(), b.front().cols()));
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    // Lambda_k (x) I has coefficient lambda^p on block k - p
    auto lambda_poly = [n](std::size_t k) {
        PolyMat c(k + 1, ComplexMatrix((k + 1) * n, n));
        for (std::size_t p = 0; p <= k; ++p) detail::put_scaled_identity(c[p], k - p, 0, n, 1.0);
        return c;
    };
    PolyMat left = lambda_poly(eta);
    for (auto& c : left) c = c.transpose();
    const PolyMat mid{m.M0c, m.M1};
    PolyMat q = multiply(multiply(left, mid), lambda_poly(eps));
    return MatrixPolynomial(std::move(q));
}

/// Anti-diagonal sum conditions with 1-based block indices:
/// sum_{i+j=d+2-k} [M1]_ij + sum_{i+j=d+1-k} [M0]_ij = A_k, k = 0..d.
inline bool check_antidiagonal_sums(const MPencil& m, const MatrixPolynomial& p, double rel_tol = 1e-12) {
    const std::size_t n = p.n();
    const std::size_t d = p.grade();
    if (n == 0 || m.M1.rows() % n || m.M1.cols() % n) throw DimensionError("check_antidiagonal_sums: bad block shape");
    const std::size_t rows = m.M1.rows() / n;  // eta + 1
    const std::size_t cols = m.M1.cols() / n;  // eps + 1
    if (rows + cols - 1 != d || m.M0c.rows() != m.M1.rows() || m.M0c.cols() != m.M1.cols())
        throw DimensionError("check_antidiagonal_sums: M is not shaped for this grade");
    double scale = 0.0;
    for (const auto& a : p.coeffs()) scale = std::max(scale, frobenius_norm(a));
    for (std::size_t k = 0; k <= d; ++k) {
        ComplexMatrix sum(n, n);
        for (std::size_t i = 1; i <= rows; ++i)
            for (std::size_t j = 1; j <= cols; ++j) {
                if (i + j == d + 2 - k) sum += m.M1.block((i - 1) * n, (j - 1) * n, n, n);
                if (i + j == d + 1 - k) sum += m.M0c.block((i - 1) * n, (j - 1) * n, n, n);
            }
        if (frobenius_norm(sum - p[k]) > rel_tol * std::max(scale, 1e-300)) return false;
    }
    return true;
}

/// The unpermuted block Kronecker pencil built from eps, eta and M.
inline Pencil assemble_core(std::size_t eps, std::size_t eta, std::size_t n, const MPencil& m) {
    const std::size_t d = eps + eta + 1;
    if (m.M1.rows() != (eta + 1) * n || m.M1.cols() != (eps + 1) * n)
        throw DimensionError("assemble: M does not have (eta+1)n x (eps+1)n shape");
    Pencil l{ComplexMatrix(d * n, d * n), ComplexMatrix(d * n, d * n)};
    l.A.set_block(0, 0, m.M0c);
    l.B.set_block(0, 0, -m.M1);
    // L_eta^T (x) I in the top-right corner: (j, j) = -I, (j+1, j) = lambda I
    for (std::size_t j = 0; j < eta; ++j) {
        detail::put_scaled_identity(l.A, j, eps + 1 + j, n, -1.0);
        detail::put_scaled_identity(l.B, j + 1, eps + 1 + j, n, -1.0);
    }
    // L_eps (x) I in the bottom-left corner
    for (std::size_t j = 0; j < eps; ++j) {
        detail::put_scaled_identity(l.A, eta + 1 + j, j, n, -1.0);
        detail::put_scaled_identity(l.B, eta + 1 + j, j + 1, n, -1.0);
    }
    return l;
}

inline Pencil permute_blocks(const Pencil& core, const std::vector<std::size_t>& row_perm,
                             const std::vector<std::size_t>& col_perm, std::size_t n) {
    const std::size_t d = row_perm.size();
    Pencil out{ComplexMatrix(d * n, d * n), ComplexMatrix(d * n, d * n)};
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            out.A.set_block(i * n, j * n, core.A.block(row_perm[i] * n, col_perm[j] * n, n, n));
            out.B.set_block(i * n, j * n, core.B.block(row_perm[i] * n, col_perm[j] * n, n, n));
        }
    return out;
}

/// (Pi_r (x) I_n) core (Pi_c (x) I_n) for a form describing a linearization of p.
inline Pencil assemble(const MatrixPolynomial& p, const BlockKroneckerForm& form) {
    const std::size_t d = form.degree();
    if (d != p.grade() || form.n != p.n()) throw DimensionError("assemble: form does not match the polynomial");
    detail::check_perm(form.rowPerm, d, "assemble");
    detail::check_perm(form.colPerm, d, "assemble");
    const Pencil core = assemble_core(form.eps, form.eta, form.n, form.M);
    return permute_blocks(core, form.rowPerm, form.colPerm, form.n);
}

/// Frobenius companion form written out directly from its block display.
inline Pencil frobenius_pencil(const MatrixPolynomial& p) {
    const std::size_t n = p.n();
    const std::size_t d = p.grade();
    Pencil l{ComplexMatrix(d * n, d * n), ComplexMatrix(d * n, d * n)};
    l.B.set_block(0, 0, -p[d]);
    for (std::size_t j = 0; j < d; ++j) l.A.set_block(0, j * n, p[d - 1 - j]);
    for (std::size_t i = 1; i < d; ++i) {
        detail::put_scaled_identity(l.A, i, i - 1, n, -1.0);
        detail::put_scaled_identity(l.B, i, i, n, -1.0);
    }
    return l;
}

/// The three degree-5 test pencils exactly as tabulated for the experiments
/// (A - lambda B with blocks written entry for entry).
inline Pencil printed_pencil(const MatrixPolynomial& p, LinearizationLabel label) {
    if (p.grade() != 5) throw DomainError("printed_pencil: the tabulated pencils are for degree 5");
    const std::size_t n = p.n();
    Pencil l{ComplexMatrix(5 * n, 5 * n), ComplexMatrix(5 * n, 5 * n)};
    auto A = [&](std::size_t i, std::size_t j, const ComplexMatrix& b) { l.A.set_block((i - 1) * n, (j - 1) * n, b); };
    auto B = [&](std::size_t i, std::size_t j, const ComplexMatrix& b) { l.B.set_block((i - 1) * n, (j - 1) * n, b); };
    const ComplexMatrix minus_i = detail::scaled_identity(n, -1.0);
    switch (label) {
        case LinearizationLabel::L1:
            A(1, 1, p[4]), A(1, 2, p[3]), A(1, 3, p[2]), A(1, 4, p[1]), A(1, 5, p[0]);
            A(2, 1, minus_i), A(3, 2, minus_i), A(4, 3, minus_i), A(5, 4, minus_i);
            B(1, 1, -p[5]), B(2, 2, minus_i), B(3, 3, minus_i), B(4, 4, minus_i), B(5, 5, minus_i);
            break;
        case LinearizationLabel::L2:
            A(1, 1, p[4]), A(1, 2, p[3]), A(1, 3, p[2]), A(1, 4, p[1]), A(1, 5, minus_i);
            A(2, 4, p[0]);
            A(3, 1, minus_i), A(4, 2, minus_i), A(5, 3, minus_i);
            B(1, 1, -p[5]), B(2, 5, minus_i), B(3, 2, minus_i), B(4, 3, minus_i), B(5, 4, minus_i);
            break;
        case LinearizationLabel::L3:
            A(1, 1, p[4]), A(1, 4, minus_i);
            A(2, 2, p[2]), A(2, 5, minus_i);
            A(3, 3, p[0]);
            A(4, 1, minus_i), A(5, 2, minus_i);
            B(1, 1, -p[5]);
            B(2, 2, -p[3]), B(2, 4, minus_i);
            B(3, 3, -p[1]), B(3, 5, minus_i);
            B(4, 2, minus_i), B(5, 3, minus_i);
            break;
        case LinearizationLabel::Custom: throw DomainError("printed_pencil: no tabulated custom pencil");
    }
    return l;
}

namespace detail {

/// Backtracking search for block permutations with target = Pi_r core Pi_c.
/// `wild(i, j)` marks core blocks that match anything. `accept` sees every
/// structural match and returns true to stop the search.
class PermutationSearch {
public:
    PermutationSearch(const Pencil& target, const Pencil& core, std::size_t n,
                      std::function<bool(std::size_t, std::size_t)> wild)
        : d_(target.size() / n), match_(d_ * d_ * d_ * d_, false) {
        double scale = 0.0;
        scale = std::max({scale, max_abs(target.A), max_abs(target.B), max_abs(core.A), max_abs(core.B)});
        const double tol = 1e-12 * std::max(scale, 1.0);
        for (std::size_t tr = 0; tr < d_; ++tr)
            for (std::size_t tc = 0; tc < d_; ++tc)
                for (std::size_t cr = 0; cr < d_; ++cr)
                    for (std::size_t cc = 0; cc < d_; ++cc) {
                        bool ok = wild && wild(cr, cc);
                        if (!ok) {
                            ok = true;
                            for (std::size_t i = 0; i < n && ok; ++i)
                                for (std::size_t j = 0; j < n && ok; ++j) {
                                    const std::size_t ti = tr * n + i, tj = tc * n + j;
                                    const std::size_t ci = cr * n + i, cj = cc * n + j;
                                    ok = std::abs(target.A(ti, tj) - core.A(ci, cj)) <= tol &&
                                         std::abs(target.B(ti, tj) - core.B(ci, cj)) <= tol;
                                }
                        }
                        match_[index(tr, tc, cr, cc)] = ok;
                    }
    }

    /// Returns true if `accept` stopped the search.
    bool run(const std::function<bool(const std::vector<std::size_t>&, const std::vector<std::size_t>&)>& accept) {
        accept_ = &accept;
        col_.assign(d_, 0);
        col_used_.assign(d_, false);
        return assign_col(0);
    }

private:
    std::size_t index(std::size_t tr, std::size_t tc, std::size_t cr, std::size_t cc) const {
        return ((tr * d_ + tc) * d_ + cr) * d_ + cc;
    }

    bool row_compatible(std::size_t tr, std::size_t cr, std::size_t assigned) const {
        for (std::size_t j = 0; j < assigned; ++j)
            if (!match_[index(tr, j, cr, col_[j])]) return false;
        return true;
    }

    bool rows_feasible(std::size_t assigned) const {
        for (std::size_t tr = 0; tr < d_; ++tr) {
            bool any = false;
            for (std::size_t cr = 0; cr < d_ && !any; ++cr) any = row_compatible(tr, cr, assigned);
            if (!any) return false;
        }
        return true;
    }

    bool assign_col(std::size_t j) {
        if (j == d_) {
            row_.assign(d_, 0);
            row_used_.assign(d_, false);
            return assign_row(0);
        }
        for (std::size_t c = 0; c < d_; ++c) {
            if (col_used_[c]) continue;
            col_[j] = c;
            col_used_[c] = true;
            if (rows_feasible(j + 1) && assign_col(j + 1)) return true;
            col_used_[c] = false;
        }
        return false;
    }

    bool assign_row(std::size_t i) {
        if (i == d_) return (*accept_)(row_, col_);
        for (std::size_t r = 0; r < d_; ++r) {
            if (row_used_[r] || !row_compatible(i, r, d_)) continue;
            row_[i] = r;
            row_used_[r] = true;
            if (assign_row(i + 1)) return true;
            row_used_[r] = false;
        }
        return false;
    }

    std::size_t d_;
    std::vector<bool> match_;
    std::vector<std::size_t> col_, row_;
    std::vector<bool> col_used_, row_used_;
    const std::function<bool(const std::vector<std::size_t>&, const std::vector<std::size_t>&)>* accept_ = nullptr;
};

}  // namespace detail

struct BlockPermutations {
    std::vector<std::size_t> rowPerm;
    std::vector<std::size_t> colPerm;
};

/// Finds block permutations with target = (Pi_r (x) I) core (Pi_c (x) I) for the
/// core assembled from (eps, eta, M). Throws NoMatch when none exists.
inline BlockPermutations discover_permutation(const Pencil& target, const MatrixPolynomial& p, std::size_t eps,
                                              std::size_t eta, const MPencil& m) {
    const std::size_t n = p.n();
    const std::size_t d = eps + eta + 1;
    if (d != p.grade() || target.size() != d * n || target.B.rows() != d * n)
        throw DimensionError("discover_permutation: target is not dn x dn for this (eps, eta)");
    if (d > 6) throw DomainError("discover_permutation: exhaustive search limited to d <= 6");
    const Pencil core = assemble_core(eps, eta, n, m);
    detail::PermutationSearch search(target, core, n, nullptr);
    BlockPermutations found;
    const bool ok = search.run([&](const auto& r, const auto& c) {
        found = {r, c};
        return true;
    });
    if (!ok) throw NoMatch("discover_permutation: no block permutation reproduces the target");
    return found;
}

/// Recovers a block Kronecker description (eps, eta, M, permutations) of an
/// arbitrary dn x dn pencil: for each eps the L-blocks are matched structurally
/// with M left free, M is read off the target, and the candidate is accepted
/// once M satisfies the anti-diagonal sum conditions for p.
inline BlockKroneckerForm identify_block_kronecker(const Pencil& target, const MatrixPolynomial& p,
                                                   LinearizationLabel label = LinearizationLabel::Custom) {
    const std::size_t n = p.n();
    const std::size_t d = p.grade();
    if (target.size() != d * n) throw DimensionError("identify_block_kronecker: target is not dn x dn");
    if (d > 6) throw DomainError("identify_block_kronecker: exhaustive search limited to d <= 6");
    for (std::size_t eps = 0; eps < d; ++eps) {
        const std::size_t eta = d - 1 - eps;
        const MPencil blank{ComplexMatrix((eta + 1) * n, (eps + 1) * n), ComplexMatrix((eta + 1) * n, (eps + 1) * n)};
        const Pencil core = assemble_core(eps, eta, n, blank);
        detail::PermutationSearch search(target, core, n,
                                         [eps, eta](std::size_t i, std::size_t j) { return i <= eta && j <= eps; });
        std::optional<BlockKroneckerForm> found;
        search.run([&](const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) {
            MPencil m = blank;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    if (r[i] > eta || c[j] > eps) continue;
                    m.M0c.set_block(r[i] * n, c[j] * n, target.A.block(i * n, j * n, n, n));
                    m.M1.set_block(r[i] * n, c[j] * n, -target.B.block(i * n, j * n, n, n));
                }
            if (!check_antidiagonal_sums(m, p)) return false;
            found = BlockKroneckerForm{eps, eta, n, std::move(m), r, c, label};
            return true;
        });
        if (found) return *found;
    }
    throw NoMatch("identify_block_kronecker: target is not a permuted block Kronecker linearization of P");
}

/// Block Kronecker description of the tabulated pencils. L1 is the Frobenius
/// form for any degree; L2 and L3 are recovered from their tabulated entries.
inline BlockKroneckerForm preset_linearization(const MatrixPolynomial& p, LinearizationLabel label) {
    const std::size_t d = p.grade();
    switch (label) {
        case LinearizationLabel::L1:
            return {d - 1, 0, p.n(), m0_pencil(p, d - 1, 0), identity_permutation(d), identity_permutation(d), label};
        case LinearizationLabel::L2:
        case LinearizationLabel::L3:
            if (d != 5) throw DomainError("preset_linearization: L2 and L3 are defined for degree 5");
            return identify_block_kronecker(printed_pencil(p, label), p, label);
        case LinearizationLabel::Custom: break;
    }
    throw DomainError("preset_linearization: no preset for a custom label");
}

// --- right-sided factorizations -----------------------------------------

enum class FactorVariant { H1, H2 };
enum class FactorDomain { AllComplex, NonzeroComplex };

/// L(lambda) H(lambda) = g(lambda) (x) P(lambda) for a block Kronecker form.
///   H1: [Lambda_eps (x) I; R_eta M Lambda_eps],                 g = e_{eta+1}
///   H2: [lambda^-eps Lambda_eps; -lambda^-(d-1) S_eta M Lambda_eps], g = lambda^-(d-1) e_1
/// Block permutations of the form carry over as H <- Pi_c^T H, g <- Pi_r g.
class FactorPair {
public:
    FactorPair(BlockKroneckerForm form, FactorVariant variant) : form_(std::move(form)), variant_(variant) {
        const std::size_t core_index = variant_ == FactorVariant::H1 ? form_.eps : 0;
        for (std::size_t j = 0; j < form_.colPerm.size(); ++j)
            if (form_.colPerm[j] == core_index) identity_block_ = j;
    }

    FactorVariant variant() const noexcept { return variant_; }
    FactorDomain domain() const noexcept {
        return variant_ == FactorVariant::H1 ? FactorDomain::AllComplex : FactorDomain::NonzeroComplex;
    }
    /// Block of H(lambda) (0-based) that equals I_n.
    std::size_t identityBlockIndex() const noexcept { return identity_block_; }
    const BlockKroneckerForm& form() const noexcept { return form_; }

    bool in_domain(cplx lambda) const { return variant_ == FactorVariant::H1 || lambda != cplx{}; }

    ComplexMatrix H(cplx lambda) const {
        check_domain(lambda);
        const std::size_t n = form_.n, eps = form_.eps, eta = form_.eta, d = form_.degree();
        const ComplexMatrix lam_eps = lambda_block(eps, lambda, n);
        ComplexMatrix top = lam_eps;
        ComplexMatrix bottom;
        const ComplexMatrix m_lam = form_.M.eval(lambda) * lam_eps;
        if (variant_ == FactorVariant::H1) {
            bottom = r_block(eta, lambda, n) * m_lam;
        } else {
            top *= std::pow(lambda, -static_cast<int>(eps));
            bottom = s_block(eta, lambda, n) * m_lam;
            // negated: with L_k = [-I, lambda I] blocks the S-part enters with a minus sign
            bottom *= -std::pow(lambda, -static_cast<int>(d - 1));
        }
        ComplexMatrix core(d * n, n);
        core.set_block(0, 0, top);
        if (eta > 0) core.set_block((eps + 1) * n, 0, bottom);
        ComplexMatrix out(d * n, n);
        for (std::size_t j = 0; j < d; ++j) out.set_block(j * n, 0, core.block(form_.colPerm[j] * n, 0, n, n));
        return out;
    }

    ComplexVector g(cplx lambda) const {
        check_domain(lambda);
        const std::size_t d = form_.degree();
        ComplexVector core(d);
        if (variant_ == FactorVariant::H1)
            core[form_.eta] = 1.0;
        else
            core[0] = std::pow(lambda, -static_cast<int>(d - 1));
        ComplexVector out(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = core[form_.rowPerm[i]];
        return out;
    }

private:
    void check_domain(cplx lambda) const {
        if (!in_domain(lambda)) throw DomainError("FactorPair: H2 factorization is not defined at lambda = 0");
    }

    BlockKroneckerForm form_;
    FactorVariant variant_;
    std::size_t identity_block_ = 0;
};

inline FactorPair right_factor(const BlockKroneckerForm& form, FactorVariant variant) {
    return FactorPair(form, variant);
}

/// H1 inside the unit disk, H2 outside it.
inline FactorVariant variant_for(cplx lambda) {
    return std::abs(lambda) < 1.0 ? FactorVariant::H1 : FactorVariant::H2;
}

/// Extracts the polynomial eigenvector from a pencil eigenvector v by reading
/// the identity block of H(lambda~); falls back to the block with the smallest
/// normalized polynomial residual when that block has (numerically) vanished.
inline ComplexVector recover_eigenvector(std::span<const cplx> v, const MatrixPolynomial& p,
                                         const BlockKroneckerForm& form, cplx lambda) {
    const std::size_t n = form.n;
    const std::size_t d = form.degree();
    if (v.size() != d * n) throw DimensionError("recover_eigenvector: v must have length dn");
    const double nv = norm2(v);
    const FactorPair fp(form, variant_for(lambda));
    ComplexVector x = column_vector_block(v, fp.identityBlockIndex(), n);
    if (nv > 0.0 && norm2(x) >= 1e-8 * nv) return normalized(x);

    const ComplexMatrix pl = eval(p, lambda);
    double best = std::numeric_limits<double>::infinity();
    std::optional<ComplexVector> pick;
    for (std::size_t j = 0; j < d; ++j) {
        ComplexVector blk = column_vector_block(v, j, n);
        const double nb = norm2(blk);
        if (!(nb > 0.0) || nb < 1e-14 * nv) continue;
        const double r = norm2(pl * blk) / nb;
        if (r < best) {
            best = r;
            pick = std::move(blk);
        }
    }
    if (!pick) throw DomainError("recover_eigenvector: every block of v is numerically zero");
    return normalized(*pick);
}

struct FactorizationSample {
    cplx lambda{};
    double relResidual = 0.0;  // max|LH - g (x) P| / max(max|g (x) P|, max|L| max|H|)
    double sigmaMinH = 0.0;
    double gNorm = 0.0;
};

struct FactorizationReport {
    std::vector<FactorizationSample> samples;
    bool pass = true;
    double worstResidual = 0.0;
};

inline FactorizationReport verify_right_sided_factorization(const Pencil& l, const FactorPair& fp,
                                                            const MatrixPolynomial& p, std::span<const cplx> samples,
                                                            double tol = 1e-12) {
    FactorizationReport rep;
    const std::size_t n = p.n();
    for (const cplx lam : samples) {
        if (!fp.in_domain(lam)) throw DomainError("verify_right_sided_factorization: sample outside factor domain");
        const ComplexMatrix h = fp.H(lam);
        const ComplexVector g = fp.g(lam);
        const ComplexMatrix pl = eval(p, lam);
        const ComplexMatrix ll = l.eval(lam);
        ComplexMatrix rhs(g.size() * n, n);
        for (std::size_t i = 0; i < g.size(); ++i) rhs.set_block(i * n, 0, pl * g[i]);
        const ComplexMatrix lh = ll * h;
        const double denom = std::max(max_abs(rhs), max_abs(ll) * max_abs(h));
        FactorizationSample s;
        s.lambda = lam;
        s.relResidual = max_abs(lh - rhs) / denom;
        s.sigmaMinH = smallest_singular_value(h);
        s.gNorm = norm2(g);
        rep.worstResidual = std::max(rep.worstResidual, s.relResidual);
        if (!(s.relResidual <= tol) || !(s.sigmaMinH > 1e-10) || !(s.gNorm > 0.0)) rep.pass = false;
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace pepbound
