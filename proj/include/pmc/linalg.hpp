#pragma once

#include "pmc/errors.hpp"
#include "pmc/rational.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace pmc {

// Small dense row-major matrix; sized for control-state-level systems.
template <class T>
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}

    T& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    Matrix operator*(const Matrix& o) const {
        Matrix out(rows, o.cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < cols; ++k) {
                const T& v = (*this)(i, k);
                if (v == T(0)) continue;
                for (std::size_t j = 0; j < o.cols; ++j) out(i, j) += v * o(k, j);
            }
        return out;
    }

    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> out(rows, T(0));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) out[i] += (*this)(i, j) * x[j];
        return out;
    }

    Matrix operator+(const Matrix& o) const {
        Matrix out = *this;
        for (std::size_t i = 0; i < a.size(); ++i) out.a[i] += o.a[i];
        return out;
    }
    Matrix operator-(const Matrix& o) const {
        Matrix out = *this;
        for (std::size_t i = 0; i < a.size(); ++i) out.a[i] -= o.a[i];
        return out;
    }
};

template <class T>
inline T abs_value(const T& x) { return x < T(0) ? T(-x) : x; }

// In-place Gaussian elimination, returns the solution of A x = b.
// Rational: exact, first-nonzero pivot. double: partial pivoting.
template <class T>
inline std::vector<T> gauss_solve(Matrix<T> A, std::vector<T> b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n) throw PreconditionError("gauss_solve: shape mismatch");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        if constexpr (std::is_same_v<T, double>) {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
        } else {
            while (pivot < n && A(pivot, col) == T(0)) ++pivot;
            if (pivot == n) throw PreconditionError("gauss_solve: singular matrix");
        }
        if (A(pivot, col) == T(0)) throw PreconditionError("gauss_solve: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(pivot, j), A(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            if (A(r, col) == T(0)) continue;
            T f = A(r, col) / A(col, col);
            A(r, col) = T(0);
            for (std::size_t j = col + 1; j < n; ++j) A(r, j) -= f * A(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<T> x(n, T(0));
    for (std::size_t i = n; i-- > 0;) {
        T acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= A(i, j) * x[j];
        x[i] = acc / A(i, i);
    }
    return x;
}

// double solve with one iterative-refinement pass (residual in long double).
inline std::vector<double> gauss_solve_refined(const Matrix<double>& A, const std::vector<double>& b) {
    std::vector<double> x = gauss_solve(A, b);
    std::vector<double> r(b.size());
    for (std::size_t i = 0; i < A.rows; ++i) {
        long double acc = b[i];
        for (std::size_t j = 0; j < A.cols; ++j)
            acc -= static_cast<long double>(A(i, j)) * x[j];
        r[i] = static_cast<double>(acc);
    }
    std::vector<double> dx = gauss_solve(A, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    return x;
}

inline double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Power-iteration estimate of the spectral radius of a non-negative matrix.
inline double spectral_radius_estimate(const Matrix<double>& M, int iters = 2000) {
    const std::size_t n = M.rows;
    if (n == 0) return 0.0;
    std::vector<double> v(n, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> w = M.apply(v);
        double norm = inf_norm(w);
        if (norm == 0.0) return 0.0;
        for (auto& x : w) x /= norm;
        lambda = norm;
        v = std::move(w);
    }
    return lambda;
}

} // namespace pmc
