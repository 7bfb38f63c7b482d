#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pepbound {

using cplx = std::complex<double>;

// Error taxonomy shared by every module.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct Breakdown : Error {
    using Error::Error;
};

namespace detail {
inline cplx conj_value(const cplx& z) { return std::conj(z); }
inline double conj_value(double x) { return x; }
}  // namespace detail

/// Dense row-major matrix. T is std::complex<double> for the double-precision
/// engine and a double-double complex type inside the reference oracle.
template <typename T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) throw DimensionError("Matrix: entry count does not match shape");
    }
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionError("Matrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }
    std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<T> col(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(std::size_t j, std::span<const T> c) {
        if (c.size() != rows_) throw DimensionError("Matrix::set_col: length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("Matrix::block: out of range");
        Matrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionError("Matrix::set_block: out of range");
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    Matrix adjoint() const {
        Matrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) a(j, i) = detail::conj_value((*this)(i, j));
        return a;
    }
    Matrix transpose() const {
        Matrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) a(j, i) = (*this)(i, j);
        return a;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    template <typename S>
    Matrix& operator*=(const S& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("Matrix product: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, std::span<const T> x) {
        if (a.cols_ != x.size()) throw DimensionError("Matrix-vector product: length mismatch");
        std::vector<T> y(a.rows_, T{});
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T s{};
            for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }
    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
        return a * std::span<const T>(x);
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("Matrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ComplexMatrix = Matrix<cplx>;
using ComplexVector = std::vector<cplx>;

inline double frobenius_norm(const ComplexMatrix& a) {
    // scaled accumulation keeps huge/tiny entries from overflowing
    double scale = 0.0;
    for (const auto& z : a.entries()) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& z : a.entries()) s += std::norm(z / scale);
    return scale * std::sqrt(s);
}

inline double norm2(std::span<const cplx> x) {
    double scale = 0.0;
    for (const auto& z : x) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& z : x) s += std::norm(z / scale);
    return scale * std::sqrt(s);
}

inline double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const auto& z : a.entries()) m = std::max(m, std::abs(z));
    return m;
}

/// w* u
inline cplx dot(std::span<const cplx> w, std::span<const cplx> u) {
    if (w.size() != u.size()) throw DimensionError("dot: length mismatch");
    cplx s{};
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(w[i]) * u[i];
    return s;
}

inline ComplexVector normalized(std::span<const cplx> x) {
    const double nx = norm2(x);
    if (nx == 0.0) throw DomainError("normalized: zero vector");
    ComplexVector y(x.begin(), x.end());
    for (auto& z : y) z /= nx;
    return y;
}

inline ComplexVector column_vector_block(std::span<const cplx> v, std::size_t block, std::size_t n) {
    if ((block + 1) * n > v.size()) throw DimensionError("column_vector_block: out of range");
    return ComplexVector(v.begin() + static_cast<std::ptrdiff_t>(block * n),
                         v.begin() + static_cast<std::ptrdiff_t>((block + 1) * n));
}

/// Kronecker product a ⊗ b.
template <typename T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const T aij = a(i, j);
            if (aij == T{}) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

}  // namespace pepbound
