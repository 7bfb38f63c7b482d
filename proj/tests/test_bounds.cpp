#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <pepbound/bounds.hpp>
#include <pepbound/denseig.hpp>

#include "support.hpp"

using namespace pepbound;
using namespace testing_support;

namespace {

/// min over a polar grid of alpha of || u/|u| - alpha w ||, plus the value at the closed-form minimizer.
std::pair<double, double> variational_angle(const ComplexVector& u, const ComplexVector& w) {
    const ComplexVector uh = normalized(u);
    const double nw2 = std::pow(norm2(w), 2);
    auto dist = [&](cplx alpha) {
        ComplexVector r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = uh[i] - alpha * w[i];
        return norm2(r);
    };
    const cplx best_alpha = dot(w, uh) / nw2;
    const double closed = dist(best_alpha);
    double grid = 1e300;
    const double rmax = 2.0 * std::abs(best_alpha) + 1e-3;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const double r = rmax * i / 99.0, t = 2.0 * M_PI * j / 100.0;
            grid = std::min(grid, dist(std::polar(r, t)));
        }
    return {closed, grid};
}

}  // namespace

TEST(SinAcuteAngle, Examples) {
    const ComplexVector u{1.0, 2.0, cplx(0.0, 1.0)};
    ComplexVector w = u;
    for (auto& z : w) z *= cplx(0.0, 3.0);
    EXPECT_LE(sin_acute_angle(u, w), 1e-15);
    EXPECT_DOUBLE_EQ(sin_acute_angle(ComplexVector{1.0, 0.0}, ComplexVector{0.0, 1.0}), 1.0);
    EXPECT_NEAR(sin_acute_angle(ComplexVector{1.0, 0.0}, ComplexVector{M_SQRT1_2, M_SQRT1_2}), M_SQRT1_2, 1e-15);
    EXPECT_THROW(sin_acute_angle(ComplexVector{0.0}, ComplexVector{1.0}), DomainError);
    EXPECT_THROW(sin_acute_angle(ComplexVector{1.0}, ComplexVector{1.0, 0.0}), DimensionError);
}

TEST(SinAcuteAngle, SymmetricAndScaleInvariant) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const ComplexVector u = random_vector(rng, 5), w = random_vector(rng, 5);
        const double s = sin_acute_angle(u, w);
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
        EXPECT_NEAR(sin_acute_angle(w, u), s, 1e-14);
        ComplexVector cu = u, cw = w;
        const cplx c = random_scalar(rng), c2 = random_scalar(rng);
        for (auto& z : cu) z *= c;
        for (auto& z : cw) z *= c2;
        EXPECT_NEAR(sin_acute_angle(cu, cw), s, 1e-14);
    }
}

TEST(SinAcuteAngle, VariationalCharacterization) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const ComplexVector u = random_vector(rng, 4), w = random_vector(rng, 4);
        const auto [closed, grid] = variational_angle(u, w);
        EXPECT_NEAR(closed, sin_acute_angle(u, w), 1e-12);
        EXPECT_LE(closed, grid + 1e-15);
    }
}

TEST(SinAcuteAngle, NearParallelKeepsRelativeAccuracy) {
    const ComplexVector u{1.0, 0.0, 0.0};
    const ComplexVector w{1.0, 1e-12, 0.0};
    EXPECT_NEAR(sin_acute_angle(u, w), 1e-12, 1e-24);
}

TEST(GepBound, Arithmetic) {
    EXPECT_EQ(gep_eigvec_bound(0.0, 1.0, 0.5), 0.0);
    EXPECT_NEAR(gep_eigvec_bound(1e-10, 1.0, 1e-2), 1e-8, 1e-22);
    EXPECT_TRUE(std::isinf(gep_eigvec_bound(1e-10, 1.0, 0.0)));
    EXPECT_THROW(gep_eigvec_bound(1.0, 0.0, 1.0), DomainError);
}

TEST(GepBound, HoldsForComputedEigenpairs) {
    std::mt19937_64 rng(3);
    const ComplexMatrix a = random_matrix(rng, 8, 8), b = random_matrix(rng, 8, 8);
    const auto s = generalized_schur(a, b);
    for (const auto& e : eigenvalues(s)) {
        // a perturbed eigenvalue and its inverse-iteration vector stand in for a computed pair
        const cplx lt = e.lambda * (1.0 + 1e-7);
        ComplexVector vt = inverse_iteration_vector(a, b, lt, 1);
        const ComplexVector noise = random_vector(rng, 8);
        for (std::size_t i = 0; i < 8; ++i) vt[i] += 1e-6 * noise[i];
        const ComplexVector v = inverse_iteration_vector(a, b, e.lambda);
        const double sep = separation(a, b, v, lt).sep;
        const double res = norm2(detail::shifted(a, b, lt) * vt);
        EXPECT_LE(sin_acute_angle(v, vt), gep_eigvec_bound(res, norm2(vt), sep) * (1.0 + 1e-10) + 1e-15);
    }
}

TEST(PepBounds, GeneralForm) {
    EXPECT_DOUBLE_EQ(pep_bound_general(1.0, 1e-12, 1e-3), 1e-9);
    EXPECT_DOUBLE_EQ(pep_bound_general(std::pow(2.0, -2.0), 1.0, 0.5), 0.5);
    EXPECT_TRUE(std::isinf(pep_bound_general(1.0, 1.0, 0.0)));
}

TEST(PepBounds, KroneckerForm) {
    EXPECT_DOUBLE_EQ(pep_bound_kronecker(1e-12, cplx(0.5, 0.5), 5, 1e-3), 1e-9);
    EXPECT_NEAR(pep_bound_kronecker(1e-12, 2.0, 5, 1e-3), 6.25e-11, 1e-24);
    EXPECT_TRUE(std::isinf(pep_bound_kronecker(1.0, 1.0, 3, 0.0)));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const cplx lam = random_scalar(rng) * 3.0;
        const std::size_t d = 1 + rng() % 8;
        const double res = unif(rng), sep = unif(rng) + 1e-3;
        const double h1 = pep_bound_general(1.0, res, sep);
        const double h2 = pep_bound_general(std::pow(std::abs(lam), -static_cast<double>(d - 1)), res, sep);
        EXPECT_NEAR(pep_bound_kronecker(res, lam, d, sep), std::min(h1, h2), 1e-14 * std::min(h1, h2));
    }
}

TEST(PepBounds, FrobeniusForm) {
    EXPECT_DOUBLE_EQ(pep_bound_frobenius(1e-8, 0.0, 4, 1e-2), 1e-6);
    EXPECT_DOUBLE_EQ(pep_bound_frobenius(1.0, cplx(0.0, 1.0), 4, 1.0), 0.5);
    EXPECT_TRUE(std::isinf(pep_bound_frobenius(1.0, 1.0, 3, 0.0)));
    // the sum is evaluated without squaring huge magnitudes
    EXPECT_NEAR(pep_bound_frobenius(1.0, 1e60, 5, 1.0), 1e-240, 1e-253);
    EXPECT_GT(pep_bound_frobenius(1.0, 1e80, 5, 1.0), 0.0);
}

TEST(PepBounds, RatioBracketSweep) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng() % 8;
        const cplx lam = random_scalar(rng) * std::pow(10.0, static_cast<double>(rng() % 9) - 4.0);
        const double ratio = pep_bound_kronecker(1.0, lam, d, 1.0) / pep_bound_frobenius(1.0, lam, d, 1.0);
        EXPECT_GE(ratio, 1.0 - 1e-12);
        EXPECT_LE(ratio, std::sqrt(static_cast<double>(d)) + 1e-12);
    }
}

TEST(PepBounds, Monotonicity) {
    const cplx lam(1.3, 0.2);
    double prev = 1e300;
    for (double sep = 1e-6; sep < 1e2; sep *= 3.0) {
        const double b = pep_bound_kronecker(1e-10, lam, 4, sep);
        EXPECT_LE(b, prev);
        EXPECT_LE(pep_bound_frobenius(1e-10, lam, 4, sep), pep_bound_frobenius(1e-10, lam, 4, sep / 3.0));
        EXPECT_LE(pep_bound_general(1.0, 1e-10, sep), pep_bound_general(1.0, 1e-10, sep / 3.0));
        prev = b;
    }
    double last = 0.0;
    for (double r = 1e-16; r < 1.0; r *= 5.0) {
        const double b = pep_bound_frobenius(r, lam, 4, 1e-2);
        EXPECT_GE(b, last);
        EXPECT_GE(pep_bound_kronecker(r, lam, 4, 1e-2), pep_bound_kronecker(r / 5.0, lam, 4, 1e-2));
        last = b;
    }
}

TEST(BlockAngle, BlockEntryInequality) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 6, n = 1 + rng() % 8, i = rng() % d;
        ComplexVector u = random_vector(rng, d * n), w = random_vector(rng, d * n);
        // unit block at index i in both
        auto unit_block = [&](ComplexVector& v) {
            double nb = 0.0;
            for (std::size_t k = 0; k < n; ++k) nb += std::norm(v[i * n + k]);
            nb = std::sqrt(nb);
            for (std::size_t k = 0; k < n; ++k) v[i * n + k] /= nb;
        };
        unit_block(u);
        unit_block(w);
        const auto ui = column_vector_block(u, i, n), wi = column_vector_block(w, i, n);
        const double lhs = sin_acute_angle(ui, wi);
        const double rhs = std::min(norm2(u), norm2(w)) * sin_acute_angle(u, w);
        EXPECT_LE(lhs, rhs + 1e-13);
    }
}
