#pragma once

#include <Eigen/Dense>

namespace ginnacer {

// Weights are stored dense and row-major; all arithmetic is double precision.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

// Elementwise max(z, 0).
inline Vector relu(const Vector& v) {
    return v.cwiseMax(0.0);
}

namespace detail {

// Dot product with a fixed, serial summation order. Centroid activation signs
// and partition validity checks must see identical rounding, so both go
// through this instead of Eigen's vectorized kernels.
inline double dot_serial(const double* a, const double* b, Index n) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

// W x + b computed row by row with dot_serial.
inline Vector affine_rows_serial(const Matrix& W, const Vector& b, const Vector& x) {
    Vector y(W.rows());
    for (Index i = 0; i < W.rows(); ++i)
        y(i) = dot_serial(W.row(i).data(), x.data(), W.cols()) + b(i);
    return y;
}

} // namespace detail

} // namespace ginnacer
