#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace drlnav {

// Dense row-major matrix of doubles. Rows are contiguous, so per-row
// dot products and axpy updates vectorize well.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    // Four accumulators keep the FMA pipes busy; gcc vectorizes this form.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    size_t n = a.size();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// out = a * b^T   (a: m x k, b: n x k, out: m x n)
inline void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.cols == b.cols && out.rows == a.rows && out.cols == b.rows);
    for (int i = 0; i < a.rows; ++i) {
        auto ai = a.row(i);
        auto oi = out.row(i);
        for (int j = 0; j < b.rows; ++j) oi[j] = dot(ai, b.row(j));
    }
}

// out = a * b     (a: m x k, b: k x n, out: m x n)
inline void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.cols == b.rows && out.rows == a.rows && out.cols == b.cols);
    out.fill(0.0);
    for (int i = 0; i < a.rows; ++i) {
        auto oi = out.row(i);
        auto ai = a.row(i);
        for (int k = 0; k < a.cols; ++k) axpy(ai[k], b.row(k), oi);
    }
}

// out += a^T * b  (a: k x m, b: k x n, out: m x n)
inline void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.rows == b.rows && out.rows == a.cols && out.cols == b.cols);
    for (int k = 0; k < a.rows; ++k) {
        auto ak = a.row(k);
        auto bk = b.row(k);
        for (int i = 0; i < a.cols; ++i) axpy(ak[i], bk, out.row(i));
    }
}

}  // namespace drlnav
