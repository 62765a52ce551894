#pragma once

#include <span>
#include <utility>

#include <bsvd/matrix.hpp>

namespace bsvd {

enum class Op { none, conj_trans };

/// C <- alpha*op(A)*op(B) + beta*C, accumulated in working precision.
/// Parallel over output columns (OpenMP) when the product is large enough.
template <Scalar T>
void gemm(T alpha, ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB, T beta,
          MatrixView<T> C);

/// Straight triple loop, kept as the serial reference for `gemm`.
template <Scalar T>
void reference_gemm(T alpha, ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB,
                    T beta, MatrixView<T> C);

/// op(A)*op(B) into a fresh matrix.
template <Scalar T>
Matrix<T> multiply(ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB = Op::none);

/// sum_p conj(x_p) * y_p
template <Scalar T>
T conj_dot(std::span<const T> x, std::span<const T> y);

/// conj_dot accumulated in long double, rounded once at the end.
template <Scalar T>
T conj_dot_wide(std::span<const T> x, std::span<const T> y);

/// Max column sum of magnitudes.
template <Scalar T>
real_t<T> one_norm(ConstMatrixView<T> A);

template <Scalar T>
real_t<T> frobenius_norm(ConstMatrixView<T> A);

/// Euclidean norm of a vector, scaled to avoid overflow/underflow.
template <Scalar T>
real_t<T> norm2(std::span<const T> x);

/// sqrt(2 * sum_{p<q} |g_pq|^2) over the strictly upper triangle.
template <Scalar T>
real_t<T> off_norm(ConstMatrixView<T> G);

template <Scalar T>
struct QrFactors {
    Matrix<T> Q; ///< m x n, orthonormal columns
    Matrix<T> R; ///< n x n, upper triangular, real non-negative diagonal
};

/// Reduced non-pivoted Householder QR of an m x n matrix with m >= n.
template <Scalar T>
QrFactors<T> householder_qr(ConstMatrixView<T> A);

} // namespace bsvd
