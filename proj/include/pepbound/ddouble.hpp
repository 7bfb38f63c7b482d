#pragma once

// Double-double arithmetic: an unevaluated sum hi + lo of two doubles giving
// roughly 31 significant decimal digits, built from error-free transformations.

#include <cmath>
#include <complex>
#include <limits>

namespace pepbound {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}  // NOLINT: implicit widening is intended
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DD operator+(const DD& a, const DD& b) {
    // accurate (IEEE-style) addition
    DD s = dd_detail::two_sum(a.hi, b.hi);
    DD t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
    DD p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, const DD& b) {
    // long division: q1 + q2 + q3
    const double q1 = a.hi / b.hi;
    DD r = a - DD(q1) * b;
    const double q2 = r.hi / b.hi;
    r = r - DD(q2) * b;
    const double q3 = r.hi / b.hi;
    DD q = dd_detail::quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }
inline DD& operator/=(DD& a, const DD& b) { return a = a / b; }

inline bool operator==(const DD& a, const DD& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(const DD& a, const DD& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DD& a, const DD& b) { return b < a; }
inline bool operator<=(const DD& a, const DD& b) { return !(b < a); }

inline DD abs(const DD& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline DD sqrt(const DD& a) {
    if (a.hi < 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    if (a.hi == 0.0) return {};
    // one Newton step on the double approximation
    const double x = std::sqrt(a.hi);
    const DD xx = dd_detail::two_prod(x, x);
    const double corr = static_cast<double>(a - xx) / (2.0 * x);
    return dd_detail::quick_two_sum(x, corr);
}

inline bool isfinite(const DD& a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

/// Complex number with double-double components.
struct DDComplex {
    DD re;
    DD im;

    constexpr DDComplex() = default;
    constexpr DDComplex(DD r, DD i = DD{}) : re(r), im(i) {}  // NOLINT: implicit widening is intended
    DDComplex(double r) : re(r) {}  // NOLINT
    DDComplex(std::complex<double> z) : re(z.real()), im(z.imag()) {}  // NOLINT

    std::complex<double> to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

inline DDComplex operator+(const DDComplex& a, const DDComplex& b) { return {a.re + b.re, a.im + b.im}; }
inline DDComplex operator-(const DDComplex& a, const DDComplex& b) { return {a.re - b.re, a.im - b.im}; }
inline DDComplex operator-(const DDComplex& a) { return {-a.re, -a.im}; }
inline DDComplex operator*(const DDComplex& a, const DDComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline DDComplex operator*(const DDComplex& a, const DD& s) { return {a.re * s, a.im * s}; }
inline DD norm(const DDComplex& a) { return a.re * a.re + a.im * a.im; }
inline DD abs(const DDComplex& a) {
    // scale to keep the squares representable
    const double m = std::max(std::abs(a.re.hi), std::abs(a.im.hi));
    if (m == 0.0) return {};
    const DD s(1.0 / m);
    const DDComplex t{a.re * s, a.im * s};
    return sqrt(norm(t)) * DD(m);
}
inline DDComplex conj(const DDComplex& a) { return {a.re, -a.im}; }
inline DDComplex operator/(const DDComplex& a, const DDComplex& b) {
    // Smith-style scaling by the larger component of b
    const double m = std::max(std::abs(b.re.hi), std::abs(b.im.hi));
    const DD s(1.0 / m);
    const DDComplex bs{b.re * s, b.im * s};
    const DDComplex num = a * conj(bs);
    const DD den = norm(bs);
    return {num.re / den * s, num.im / den * s};
}
inline DDComplex& operator+=(DDComplex& a, const DDComplex& b) { return a = a + b; }
inline DDComplex& operator-=(DDComplex& a, const DDComplex& b) { return a = a - b; }
inline DDComplex& operator*=(DDComplex& a, const DDComplex& b) { return a = a * b; }
inline bool operator==(const DDComplex& a, const DDComplex& b) { return a.re == b.re && a.im == b.im; }

}  // namespace pepbound
