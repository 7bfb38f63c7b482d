#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <pepbound/denseig.hpp>

#include "support.hpp"

using namespace pepbound;
using namespace testing_support;

namespace {

double reconstruction_error(const GeneralizedSchur& s, const ComplexMatrix& a, bool use_b) {
    const ComplexMatrix& t = use_b ? s.TB : s.TA;
    return frobenius_norm(s.Q * t * s.Z.adjoint() - a);
}

double unitarity_defect(const ComplexMatrix& u) {
    return frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(u.rows()));
}

bool upper_triangular(const ComplexMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m(i, j) != cplx{}) return false;
    return true;
}

std::vector<cplx> sorted_finite(const std::vector<GeneralizedEigenvalue>& ev) {
    std::vector<cplx> out;
    for (const auto& e : ev)
        if (!e.infinite) out.push_back(e.lambda);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

}  // namespace

TEST(SingularValues, DiagonalAndUnitary) {
    ComplexMatrix d{{3.0, 0.0}, {0.0, 1e-5}};
    EXPECT_NEAR(smallest_singular_value(d), 1e-5, 1e-5 * 1e-12);
    std::mt19937_64 rng(3);
    const ComplexMatrix u = random_unitary(rng, 7);
    EXPECT_NEAR(smallest_singular_value(u), 1.0, 1e-13);
    EXPECT_NEAR(spectral_norm(u), 1.0, 1e-13);
}

TEST(SingularValues, EmptyIsInfinite) {
    EXPECT_TRUE(std::isinf(smallest_singular_value(ComplexMatrix(0, 0))));
}

TEST(SingularValues, MatchesJacobiOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix m = random_matrix(rng, 12, 12);
        const double expect = jacobi_sigma_min(m);
        EXPECT_NEAR(smallest_singular_value(m), expect, 1e-9 * expect) << "trial " << trial;
    }
    // rectangular, both orientations
    const ComplexMatrix tall = random_matrix(rng, 9, 5);
    EXPECT_NEAR(smallest_singular_value(tall), jacobi_sigma_min(tall), 1e-10);
    const ComplexMatrix wide = tall.adjoint();
    EXPECT_NEAR(smallest_singular_value(wide), jacobi_sigma_min(tall), 1e-10);
}

TEST(SingularValues, UnitaryInvariance) {
    std::mt19937_64 rng(12);
    const ComplexMatrix m = random_matrix(rng, 10, 10);
    const ComplexMatrix u = random_unitary(rng, 10), v = random_unitary(rng, 10);
    const double s = smallest_singular_value(m);
    EXPECT_NEAR(smallest_singular_value(u * m * v), s, 1e-11 * s);
}

TEST(UnitaryCompletion, FirstColumnAndUnitarity) {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 2u, 5u, 17u}) {
        const ComplexVector u = normalized(random_vector(rng, n));
        const ComplexMatrix w = unitary_completion(u);
        EXPECT_LE(unitarity_defect(w), 1e-13 * n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(std::abs(w(i, 0) - u[i]), 0.0, 1e-15);
    }
    const ComplexVector e1{1.0, 0.0, 0.0};
    const ComplexMatrix w = unitary_completion(e1);
    EXPECT_LE(frobenius_norm(w - ComplexMatrix::identity(3)), 1e-15);
    EXPECT_THROW(unitary_completion(ComplexVector{0.0, 0.0}), DomainError);
    EXPECT_THROW(unitary_completion(ComplexVector{2.0, 0.0}), DomainError);
}

TEST(GeneralizedSchur, DiagonalPencil) {
    ComplexMatrix a{{2.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, cplx(0.0, 3.0)}};
    const auto s = generalized_schur(a, ComplexMatrix::identity(3));
    const auto ev = sorted_finite(eigenvalues(s));
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_NEAR(std::abs(ev[0] - cplx(-1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ev[1] - cplx(0.0, 3.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ev[2] - cplx(2.0)), 0.0, 1e-15);
}

TEST(GeneralizedSchur, ReconstructionAndUnitarity) {
    std::mt19937_64 rng(21);
    for (std::size_t n : {1u, 2u, 3u, 6u, 15u, 31u, 60u}) {
        const ComplexMatrix a = random_matrix(rng, n, n), b = random_matrix(rng, n, n);
        const auto s = generalized_schur(a, b);
        EXPECT_TRUE(upper_triangular(s.TA));
        EXPECT_TRUE(upper_triangular(s.TB));
        EXPECT_LE(reconstruction_error(s, a, false), 1e-12 * n * frobenius_norm(a)) << n;
        EXPECT_LE(reconstruction_error(s, b, true), 1e-12 * n * frobenius_norm(b)) << n;
        EXPECT_LE(unitarity_defect(s.Q), 1e-13 * n) << n;
        EXPECT_LE(unitarity_defect(s.Z), 1e-13 * n) << n;
    }
}

TEST(GeneralizedSchur, TwoByTwoQuadraticFormula) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2);
        // det(A - lambda B) = c2 lambda^2 + c1 lambda + c0
        const cplx c2 = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
        const cplx c1 = -(a(0, 0) * b(1, 1) + b(0, 0) * a(1, 1) - a(0, 1) * b(1, 0) - b(0, 1) * a(1, 0));
        const cplx c0 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const cplx disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
        // stable root pair
        const cplx qq = -0.5 * (c1 + (std::real(std::conj(c1) * disc) >= 0 ? disc : -disc));
        std::vector<cplx> roots{qq / c2, c0 / qq};
        const auto ev = eigenvalues(generalized_schur(a, b));
        for (const auto& r : roots) {
            double best = 1e300;
            for (const auto& e : ev) best = std::min(best, rel_diff(e.lambda, r));
            EXPECT_LE(best, 1e-13) << "trial " << trial;
        }
    }
}

TEST(GeneralizedSchur, InfiniteEigenvalueMarked) {
    ComplexMatrix a{{1.0, 2.0}, {0.0, 3.0}};
    ComplexMatrix b{{1.0, 0.0}, {0.0, 0.0}};
    const auto ev = eigenvalues(generalized_schur(a, b));
    int infinite = 0;
    for (const auto& e : ev) infinite += e.infinite;
    EXPECT_EQ(infinite, 1);
    for (const auto& e : ev)
        if (!e.infinite) {
            EXPECT_NEAR(std::abs(e.lambda - cplx(1.0)), 0.0, 1e-14);
        }
}

TEST(GeneralizedSchur, SpectrumInvariantUnderUnitaryEquivalence) {
    std::mt19937_64 rng(31);
    const ComplexMatrix a = random_matrix(rng, 8, 8), b = random_matrix(rng, 8, 8);
    const ComplexMatrix u = random_unitary(rng, 8), v = random_unitary(rng, 8);
    const auto e1 = eigenvalues(generalized_schur(a, b));
    const auto e2 = eigenvalues(generalized_schur(u * a * v, u * b * v));
    for (const auto& x : e1) {
        double best = 1e300;
        for (const auto& y : e2) best = std::min(best, std::abs(x.lambda - y.lambda) / (1.0 + std::abs(x.lambda)));
        EXPECT_LE(best, 1e-12);
    }
}

TEST(GeneralizedSchur, DimensionMismatch) {
    EXPECT_THROW(generalized_schur(ComplexMatrix(2, 2), ComplexMatrix(3, 3)), DimensionError);
}

TEST(InverseIteration, DiagonalPencil) {
    ComplexMatrix a{{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 4.0}};
    const auto v = inverse_iteration_vector(a, ComplexMatrix::identity(3), 2.0 + 1e-12);
    EXPECT_NEAR(std::abs(v[1]), 1.0, 1e-10);
    EXPECT_LE(norm2(detail::shifted(a, ComplexMatrix::identity(3), 2.0) * v), 1e-10);
}

TEST(InverseIteration, ExactEigenvalueIsNudged) {
    ComplexMatrix a{{1.0, 0.0}, {0.0, 2.0}};
    const auto v = inverse_iteration_vector(a, ComplexMatrix::identity(2), 2.0);
    EXPECT_NEAR(std::abs(v[1]), 1.0, 1e-10);
}

TEST(InverseIteration, RandomPencilResidual) {
    std::mt19937_64 rng(41);
    const ComplexMatrix a = random_matrix(rng, 8, 8), b = random_matrix(rng, 8, 8);
    for (const auto& e : eigenvalues(generalized_schur(a, b))) {
        const auto v = inverse_iteration_vector(a, b, e.lambda);
        const ComplexMatrix sh = detail::shifted(a, b, e.lambda);
        EXPECT_LE(norm2(sh * v), 1e-11 * frobenius_norm(sh));
    }
}

TEST(InverseIteration, JordanLikeBlock) {
    ComplexMatrix a{{1.0, 1.0}, {0.0, 1.0}};
    const auto v = inverse_iteration_vector(a, ComplexMatrix::identity(2), 1.0 + 1e-10);
    EXPECT_NEAR(norm2(v), 1.0, 1e-14);
    EXPECT_LE(norm2(detail::shifted(a, ComplexMatrix::identity(2), 1.0) * v), 1e-8);
}

TEST(Separation, DiagonalExample) {
    ComplexMatrix a{{1.0, 0.0}, {0.0, 2.0}};
    const ComplexVector e1{1.0, 0.0};
    EXPECT_NEAR(separation(a, ComplexMatrix::identity(2), e1, 1.1).sep, 0.9, 1e-14);
    EXPECT_NEAR(separation(a, ComplexMatrix::identity(2), e1, 2.0).sep, 0.0, 1e-14);
}

TEST(Separation, Errors) {
    ComplexMatrix a{{1.0, 0.0}, {0.0, 2.0}};
    ComplexMatrix b{{0.0, 0.0}, {0.0, 1.0}};
    EXPECT_THROW(separation(a, b, ComplexVector{1.0, 0.0}, 1.0), InfiniteEigenvalue);
    EXPECT_THROW(separation(a, ComplexMatrix::identity(2), ComplexVector{1.0, 1.0}, 1.0), NotAnEigenvector);
    EXPECT_TRUE(std::isinf(separation(ComplexMatrix{{3.0}}, ComplexMatrix{{1.0}}, ComplexVector{1.0}, 3.0).sep));
}

TEST(Separation, MatchesReorderedSchur) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(rng, 10, 10), b = random_matrix(rng, 10, 10);
        const auto s = generalized_schur(a, b);
        const std::size_t k = static_cast<std::size_t>(trial) % 10;
        const cplx lam0 = s.TA(k, k) / s.TB(k, k);
        const cplx lam_tilde = lam0 * (1.0 + 1e-6) + 1e-7;
        const auto v = inverse_iteration_vector(a, b, lam0);
        const double got = separation(a, b, v, lam_tilde).sep;
        const double expect = reordered_schur_sep(s.TA, s.TB, k, lam_tilde);
        EXPECT_NEAR(got, expect, 1e-9 * expect) << "trial " << trial;
    }
}

TEST(Separation, CompletionIndependence) {
    std::mt19937_64 rng(61);
    const ComplexMatrix a = random_matrix(rng, 9, 9), b = random_matrix(rng, 9, 9);
    const auto ev = eigenvalues(generalized_schur(a, b));
    const auto v = inverse_iteration_vector(a, b, ev[3].lambda);
    ComplexVector rotated = v;
    for (auto& z : rotated) z *= std::polar(2.5, 1.234);
    const double s1 = separation(a, b, v, ev[3].lambda * 1.0001).sep;
    const double s2 = separation(a, b, rotated, ev[3].lambda * 1.0001).sep;
    EXPECT_NEAR(s1, s2, 1e-11 * s1);
}
