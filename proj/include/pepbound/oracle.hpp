#pragma once

// Extended-precision reference eigenpairs: double-precision seeds from a
// linearization, refined by Newton's method in double-double arithmetic.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "ddouble.hpp"
#include "denseig.hpp"
#include "kronlin.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "polyval.hpp"

namespace pepbound {

struct SingularJacobian : Breakdown {
    using Breakdown::Breakdown;
};

using DDVector = std::vector<DDComplex>;

struct RefEigenpair {
    DDComplex lambda;
    DDVector x;              // unit Euclidean norm
    double residual = 0.0;   // ||P(lambda) x|| / max(1, |lambda|)^d in double-double
    bool converged = false;
    bool clustered = false;  // another reference eigenvalue within 1e-8 relative
    int iterations = 0;
    std::vector<double> history;  // residual before each Newton step, then the final one
    std::string failure;          // set when refinement threw

    cplx lambda_double() const { return lambda.to_complex(); }
    ComplexVector x_double() const {
        ComplexVector v(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i].to_complex();
        return v;
    }
};

namespace detail {

/// Coefficients of P (or rev P) held in double-double.
struct DDPolynomial {
    std::size_t n = 0;
    std::vector<std::vector<DDComplex>> coeffs;  // row-major n x n per degree

    explicit DDPolynomial(const MatrixPolynomial& p, bool reversed) : n(p.n()) {
        const std::size_t d = p.grade();
        coeffs.resize(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            const auto& a = p[reversed ? d - i : i];
            coeffs[i].assign(a.entries().begin(), a.entries().end());
        }
    }

    std::size_t grade() const { return coeffs.size() - 1; }

    /// value = Q(mu) x and slope = Q'(mu) x, both by Horner on vectors.
    void apply(const DDComplex& mu, const DDVector& x, DDVector& value, DDVector* slope) const {
        const std::size_t d = grade();
        value.assign(n, DDComplex{});
        if (slope) slope->assign(n, DDComplex{});
        for (std::size_t k = d + 1; k-- > 0;) {
            if (slope && k < d)
                for (std::size_t i = 0; i < n; ++i) (*slope)[i] = (*slope)[i] * mu + value[i];
            for (std::size_t i = 0; i < n; ++i) {
                DDComplex s = value[i] * mu;
                for (std::size_t j = 0; j < n; ++j) s += coeffs[k][i * n + j] * x[j];
                value[i] = s;
            }
        }
    }

    /// Q(mu) as a dense row-major matrix.
    std::vector<DDComplex> matrix(const DDComplex& mu) const {
        std::vector<DDComplex> m(n * n);
        for (std::size_t k = grade() + 1; k-- > 0;)
            for (std::size_t e = 0; e < n * n; ++e) m[e] = m[e] * mu + coeffs[k][e];
        return m;
    }
};

inline DD dd_norm2(const DDVector& v) {
    DD s{};
    for (const auto& z : v) s += norm(z);
    return sqrt(s);
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
inline DDVector dd_solve(std::vector<DDComplex> a, DDVector b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = static_cast<double>(norm(a[k * n + k]));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = static_cast<double>(norm(a[i * n + k]));
            if (v > best) best = v, p = i;
        }
        if (!(best > 0.0)) throw SingularJacobian("refine_eigenpair: singular Newton system");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const DDComplex f = a[i * n + k] / a[k * n + k];
            if (f == DDComplex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    DDVector x(n);
    for (std::size_t k = n; k-- > 0;) {
        DDComplex s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
        x[k] = s / a[k * n + k];
    }
    return x;
}

}  // namespace detail

/// ||P(lambda) x|| / (max(1, |lambda|)^d ||x||), evaluated in double-double.
inline double homogeneous_residual(const MatrixPolynomial& p, const DDComplex& lambda, const DDVector& x) {
    const bool rev = static_cast<double>(abs(lambda)) > 1.0;
    const detail::DDPolynomial q(p, rev);
    const DDComplex mu = rev ? DDComplex(DD(1.0)) / lambda : lambda;
    DDVector r;
    q.apply(mu, x, r, nullptr);
    return static_cast<double>(detail::dd_norm2(r) / detail::dd_norm2(x));
}

/// ||P(lambda) x||_2 for double inputs, accumulated in double-double.
inline double residual_norm_extended(const MatrixPolynomial& p, cplx lambda, std::span<const cplx> x) {
    if (x.size() != p.n()) throw DimensionError("residual_norm_extended: vector length differs from n");
    const detail::DDPolynomial q(p, false);
    DDVector xv(x.begin(), x.end()), r;
    q.apply(DDComplex(lambda), xv, r, nullptr);
    return static_cast<double>(detail::dd_norm2(r));
}

/// sin of the acute angle between a double vector and a double-double one,
/// via the projection residual in double-double.
inline double sin_acute_angle_extended(std::span<const cplx> approx, const DDVector& exact) {
    if (approx.size() != exact.size()) throw DimensionError("sin_acute_angle_extended: length mismatch");
    DDVector u(approx.begin(), approx.end());
    const DD nu = detail::dd_norm2(u), nw = detail::dd_norm2(exact);
    if (nu.hi == 0.0 || nw.hi == 0.0) throw DomainError("sin_acute_angle_extended: zero vector");
    DDVector w = exact;
    for (auto& z : u) z = {z.re / nu, z.im / nu};
    for (auto& z : w) z = {z.re / nw, z.im / nw};
    DDComplex c{};
    for (std::size_t i = 0; i < u.size(); ++i) c += conj(w[i]) * u[i];
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c * w[i];
    return std::clamp(static_cast<double>(detail::dd_norm2(u)), 0.0, 1.0);
}

struct RefineOptions {
    double tolerance = 1e-25;  // relative to max ||A_i||
    int maxIterations = 50;
};

/// Newton refinement of (lambda~, x~) on F(lambda, x) = (P(lambda) x; c* x - 1)
/// with c fixed at the seed vector. Eigenvalues outside the unit disk are
/// refined as mu = 1/lambda on rev P for a bounded Jacobian.
inline RefEigenpair refine_eigenpair(const MatrixPolynomial& p, cplx lambda_seed, std::span<const cplx> x_seed,
                                     RefineOptions opt = {}) {
    const std::size_t n = p.n();
    if (x_seed.size() != n) throw DimensionError("refine_eigenpair: seed vector length differs from n");
    const double scale = std::max(max_coefficient_norm(p), 1e-300);
    const double threshold = opt.tolerance * scale;

    const bool rev = std::abs(lambda_seed) > 1.0;
    const detail::DDPolynomial q(p, rev);
    DDComplex mu = rev ? DDComplex(DD(1.0)) / DDComplex(lambda_seed) : DDComplex(lambda_seed);

    const ComplexVector c = normalized(x_seed);
    DDVector cc(c.begin(), c.end());
    // x scaled so that c* x = 1
    DDVector x(x_seed.begin(), x_seed.end());
    {
        DDComplex cx{};
        for (std::size_t i = 0; i < n; ++i) cx += conj(cc[i]) * x[i];
        if (cx == DDComplex{}) throw DomainError("refine_eigenpair: seed vector is zero");
        for (auto& z : x) z = z / cx;
    }

    RefEigenpair out;
    DDVector value, slope;
    auto residual_of = [&](const DDVector& val) {
        return static_cast<double>(detail::dd_norm2(val) / detail::dd_norm2(x));
    };
    q.apply(mu, x, value, &slope);
    double res = residual_of(value);
    out.history.push_back(res);
    while (res > threshold && out.iterations < opt.maxIterations) {
        // [Q(mu)  Q'(mu) x; c*  0] [dx; dmu] = -[Q(mu) x; c* x - 1]
        const std::size_t m = n + 1;
        std::vector<DDComplex> jac(m * m);
        const auto qm = q.matrix(mu);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) jac[i * m + j] = qm[i * n + j];
            jac[i * m + n] = slope[i];
        }
        DDComplex cx{};
        for (std::size_t j = 0; j < n; ++j) {
            jac[n * m + j] = conj(cc[j]);
            cx += conj(cc[j]) * x[j];
        }
        DDVector rhs(m);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -value[i];
        rhs[n] = DDComplex(DD(1.0)) - cx;
        const DDVector step = detail::dd_solve(std::move(jac), std::move(rhs));
        for (std::size_t i = 0; i < n; ++i) x[i] += step[i];
        mu += step[n];
        ++out.iterations;
        q.apply(mu, x, value, &slope);
        res = residual_of(value);
        out.history.push_back(res);
        if (!std::isfinite(res)) throw NonConvergence("refine_eigenpair: iterate diverged");
    }

    out.lambda = rev ? DDComplex(DD(1.0)) / mu : mu;
    const DD nx = detail::dd_norm2(x);
    for (auto& z : x) z = {z.re / nx, z.im / nx};
    out.x = std::move(x);
    out.residual = res;
    out.converged = res <= threshold;
    return out;
}

struct SpectrumOptions {
    RefineOptions refine;
    bool parallel = true;
};

/// All dn reference eigenpairs of P, sorted by |lambda| ascending. Seeds come
/// from a QZ solve of the given linearization (Frobenius form by default) and
/// eigenvector recovery; failed refinements are kept with converged = false.
inline std::vector<RefEigenpair> reference_spectrum(const MatrixPolynomial& p,
                                                    const std::optional<BlockKroneckerForm>& seed_form = std::nullopt,
                                                    SpectrumOptions opt = {}) {
    const std::size_t d = p.grade();
    const double scale = max_coefficient_norm(p);
    if (!(scale > 0.0)) throw DomainError("reference_spectrum: zero polynomial");
    if (!(smallest_singular_value(p[d]) > 1e-12 * scale))
        throw DomainError("reference_spectrum: leading coefficient is (numerically) singular");

    const BlockKroneckerForm form = seed_form ? *seed_form : preset_linearization(p, LinearizationLabel::L1);
    const Pencil l = assemble(p, form);
    const auto ev = eigenvalues(generalized_schur(l.A, l.B));

    auto refs = parallel_map(
        ev.size(),
        [&](std::size_t k) {
            RefEigenpair r;
            const cplx lam = ev[k].lambda;
            try {
                if (ev[k].infinite) throw DomainError("infinite eigenvalue in seed pencil");
                const ComplexVector v = inverse_iteration_vector(l.A, l.B, lam);
                const ComplexVector x = recover_eigenvector(v, p, form, lam);
                r = refine_eigenpair(p, lam, x, opt.refine);
            } catch (const Error& e) {
                r.lambda = DDComplex(lam);
                r.failure = e.what();
                r.converged = false;
            }
            return r;
        },
        opt.parallel);

    std::stable_sort(refs.begin(), refs.end(), [](const RefEigenpair& a, const RefEigenpair& b) {
        return abs(a.lambda) < abs(b.lambda);
    });
    for (std::size_t i = 0; i < refs.size(); ++i)
        for (std::size_t j = 0; j < refs.size(); ++j) {
            if (i == j) continue;
            const double gap = static_cast<double>(abs(refs[i].lambda - refs[j].lambda));
            if (gap <= 1e-8 * static_cast<double>(abs(refs[i].lambda))) refs[i].clustered = true;
        }
    return refs;
}

}  // namespace pepbound
