#include <bsvd/kernels.hpp>

#include <algorithm>
#include <cmath>

namespace bsvd {

namespace {

struct OpShape {
    index_t rows, cols;
};

template <class T>
OpShape op_shape(ConstMatrixView<T> A, Op op) {
    return op == Op::none ? OpShape{A.rows, A.cols} : OpShape{A.cols, A.rows};
}

template <class T>
void check_gemm_shapes(ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB,
                       MatrixView<T> C) {
    auto a = op_shape(A, opA);
    auto b = op_shape(B, opB);
    if (a.cols != b.rows)
        throw ShapeError("gemm: inner dimensions disagree");
    if (C.rows != a.rows || C.cols != b.cols)
        throw ShapeError("gemm: output shape does not match product");
}

template <class T>
T op_elem(ConstMatrixView<T> A, Op op, index_t i, index_t j) {
    return op == Op::none ? A(i, j) : conj(A(j, i));
}

template <class T>
void scale_columns(T beta, MatrixView<T> C, index_t j) {
    auto c = C.col(j);
    if (beta == T(0))
        std::fill(c.begin(), c.end(), T(0));
    else if (beta != T(1))
        for (auto &x : c)
            x *= beta;
}

constexpr index_t parallel_work_threshold = 1 << 15;

} // namespace

template <Scalar T>
void reference_gemm(T alpha, ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB,
                    T beta, MatrixView<T> C) {
    check_gemm_shapes(A, opA, B, opB, C);
    const index_t inner = op_shape(A, opA).cols;
    for (index_t j = 0; j < C.cols; ++j)
        for (index_t i = 0; i < C.rows; ++i) {
            T acc(0);
            for (index_t p = 0; p < inner; ++p)
                acc += op_elem(A, opA, i, p) * op_elem(B, opB, p, j);
            C(i, j) = alpha * acc + (beta == T(0) ? T(0) : beta * C(i, j));
        }
}

template <Scalar T>
void gemm(T alpha, ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB, T beta,
          MatrixView<T> C) {
    check_gemm_shapes(A, opA, B, opB, C);
    const index_t inner = op_shape(A, opA).cols;
    const index_t ncols = C.cols;
    [[maybe_unused]] const bool big = C.rows * ncols * std::max<index_t>(inner, 1) >
                                      parallel_work_threshold;

    if (opA == Op::none) {
        // C[:,j] += sum_p A[:,p] * (alpha*op(B)(p,j)), column axpy form
#pragma omp parallel for schedule(static) if (big)
        for (index_t j = 0; j < ncols; ++j) {
            scale_columns(beta, C, j);
            auto c = C.col(j);
            for (index_t p = 0; p < inner; ++p) {
                const T t = alpha * op_elem(B, opB, p, j);
                if (t == T(0))
                    continue;
                const T *a = A.data + p * A.ld;
                for (index_t i = 0; i < C.rows; ++i)
                    c[i] += a[i] * t;
            }
        }
        return;
    }

    if (opB == Op::none) {
        // C(i,j) = alpha * A[:,i]^H B[:,j] + beta*C(i,j), dot form
#pragma omp parallel for schedule(static) if (big)
        for (index_t j = 0; j < ncols; ++j) {
            const T *b = B.data + j * B.ld;
            for (index_t i = 0; i < C.rows; ++i) {
                const T *a = A.data + i * A.ld;
                T acc(0);
                for (index_t p = 0; p < inner; ++p)
                    acc += conj(a[p]) * b[p];
                C(i, j) = alpha * acc + (beta == T(0) ? T(0) : beta * C(i, j));
            }
        }
        return;
    }

    // A^H * B^H: rare, go elementwise
#pragma omp parallel for schedule(static) if (big)
    for (index_t j = 0; j < ncols; ++j)
        for (index_t i = 0; i < C.rows; ++i) {
            T acc(0);
            for (index_t p = 0; p < inner; ++p)
                acc += conj(A(p, i)) * conj(B(j, p));
            C(i, j) = alpha * acc + (beta == T(0) ? T(0) : beta * C(i, j));
        }
}

template <Scalar T>
Matrix<T> multiply(ConstMatrixView<T> A, Op opA, ConstMatrixView<T> B, Op opB) {
    Matrix<T> C(op_shape(A, opA).rows, op_shape(B, opB).cols);
    gemm<T>(T(1), A, opA, B, opB, T(0), C.view());
    return C;
}

template <Scalar T>
T conj_dot(std::span<const T> x, std::span<const T> y) {
    if (x.size() != y.size())
        throw ShapeError("conj_dot: length mismatch");
    T acc(0);
    for (std::size_t p = 0; p < x.size(); ++p)
        acc += conj(x[p]) * y[p];
    return acc;
}

template <Scalar T>
T conj_dot_wide(std::span<const T> x, std::span<const T> y) {
    if (x.size() != y.size())
        throw ShapeError("conj_dot: length mismatch");
    using W = std::conditional_t<is_complex_v<T>, std::complex<long double>, long double>;
    if constexpr (is_complex_v<T>) {
        long double re = 0, im = 0;
        for (std::size_t p = 0; p < x.size(); ++p) {
            const long double a = x[p].real(), b = x[p].imag();
            const long double c = y[p].real(), d = y[p].imag();
            re += a * c + b * d;
            im += a * d - b * c;
        }
        return T(static_cast<real_t<T>>(re), static_cast<real_t<T>>(im));
    } else {
        W acc(0);
        for (std::size_t p = 0; p < x.size(); ++p)
            acc += static_cast<W>(x[p]) * static_cast<W>(y[p]);
        return static_cast<T>(acc);
    }
}

template <Scalar T>
real_t<T> one_norm(ConstMatrixView<T> A) {
    using R = real_t<T>;
    R best(0);
    for (index_t j = 0; j < A.cols; ++j) {
        R s(0);
        for (index_t i = 0; i < A.rows; ++i)
            s += magnitude(A(i, j));
        best = std::max(best, s);
    }
    return best;
}

namespace {

// LAPACK-style scaled sum of squares: accumulates (scale, ssq) with
// value = scale^2 * ssq.
template <class R>
struct ScaledSsq {
    R scale = 0;
    R ssq   = 1;

    void add(R x) {
        x = std::abs(x);
        if (x == R(0))
            return;
        if (scale < x) {
            ssq   = R(1) + ssq * (scale / x) * (scale / x);
            scale = x;
        } else {
            ssq += (x / scale) * (x / scale);
        }
    }
    template <class T>
    void add_elem(T v) {
        if constexpr (is_complex_v<T>) {
            add(v.real());
            add(v.imag());
        } else {
            add(v);
        }
    }
    R value() const { return scale * std::sqrt(ssq); }
};

} // namespace

template <Scalar T>
real_t<T> norm2(std::span<const T> x) {
    ScaledSsq<real_t<T>> acc;
    for (const T &v : x)
        acc.add_elem(v);
    return acc.value();
}

template <Scalar T>
real_t<T> frobenius_norm(ConstMatrixView<T> A) {
    ScaledSsq<real_t<T>> acc;
    for (index_t j = 0; j < A.cols; ++j)
        for (index_t i = 0; i < A.rows; ++i)
            acc.add_elem(A(i, j));
    return acc.value();
}

template <Scalar T>
real_t<T> off_norm(ConstMatrixView<T> G) {
    if (G.rows != G.cols)
        throw ShapeError("off_norm: matrix is not square");
    ScaledSsq<real_t<T>> acc;
    for (index_t q = 1; q < G.cols; ++q)
        for (index_t p = 0; p < q; ++p)
            acc.add_elem(G(p, q));
    return std::sqrt(real_t<T>(2)) * acc.value();
}

template <Scalar T>
QrFactors<T> householder_qr(ConstMatrixView<T> A) {
    using R = real_t<T>;
    const index_t m = A.rows, n = A.cols;
    if (m < n)
        throw ShapeError("householder_qr: requires rows >= cols");

    Matrix<T> W = to_matrix<T>(A);
    std::vector<T> tau(static_cast<std::size_t>(n), T(0));

    // Reflector k: H = I - tau v v^H with v(k) = 1, chosen so that
    // H^H x = beta e1 with beta real.
    for (index_t k = 0; k < n; ++k) {
        auto col       = W.col(k);
        const T alpha  = col[k];
        const R xnorm  = norm2<T>(std::span<const T>(col.data() + k + 1, m - k - 1));
        const R alphi  = [&] {
            if constexpr (is_complex_v<T>)
                return alpha.imag();
            else
                return R(0);
        }();
        if (xnorm == R(0) && alphi == R(0)) {
            tau[k] = T(0);
            continue;
        }
        const R alphr = real_part(alpha);
        const R beta  = -std::copysign(std::hypot(std::abs(alpha), xnorm), alphr);
        tau[k]        = (T(beta) - alpha) / T(beta);
        const T scal  = T(1) / (alpha - T(beta));
        for (index_t i = k + 1; i < m; ++i)
            col[i] *= scal;
        col[k] = T(beta);

        // apply H^H = I - conj(tau) v v^H to the trailing columns
        const T ctau = conj(tau[k]);
        for (index_t j = k + 1; j < n; ++j) {
            auto cj = W.col(j);
            T w     = cj[k];
            for (index_t i = k + 1; i < m; ++i)
                w += conj(col[i]) * cj[i];
            w *= ctau;
            cj[k] -= w;
            for (index_t i = k + 1; i < m; ++i)
                cj[i] -= col[i] * w;
        }
    }

    QrFactors<T> out{Matrix<T>(m, n), Matrix<T>(n, n)};
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i <= j; ++i)
            out.R(i, j) = W(i, j);

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I
    auto &Q = out.Q;
    for (index_t j = 0; j < n; ++j)
        Q(j, j) = T(1);
    for (index_t k = n - 1; k >= 0; --k) {
        if (tau[k] == T(0))
            continue;
        auto v = W.col(k);
        for (index_t j = k; j < n; ++j) {
            auto qj = Q.col(j);
            T w     = qj[k];
            for (index_t i = k + 1; i < m; ++i)
                w += conj(v[i]) * qj[i];
            w *= tau[k];
            qj[k] -= w;
            for (index_t i = k + 1; i < m; ++i)
                qj[i] -= v[i] * w;
        }
    }

    // Non-negative real diagonal of R.
    for (index_t k = 0; k < n; ++k) {
        const T d = out.R(k, k);
        const R a = std::abs(d);
        if (a == R(0))
            continue;
        const T phase = d / T(a);
        if (phase == T(1))
            continue;
        for (index_t j = k; j < n; ++j)
            out.R(k, j) *= conj(phase);
        out.R(k, k) = T(a);
        for (index_t i = 0; i < m; ++i)
            Q(i, k) *= phase;
    }
    return out;
}

#define BSVD_INSTANTIATE(T)                                                                   \
    template void gemm<T>(T, ConstMatrixView<T>, Op, ConstMatrixView<T>, Op, T, MatrixView<T>); \
    template void reference_gemm<T>(T, ConstMatrixView<T>, Op, ConstMatrixView<T>, Op, T,       \
                                    MatrixView<T>);                                           \
    template Matrix<T> multiply<T>(ConstMatrixView<T>, Op, ConstMatrixView<T>, Op);           \
    template T conj_dot<T>(std::span<const T>, std::span<const T>);                           \
    template T conj_dot_wide<T>(std::span<const T>, std::span<const T>);                      \
    template real_t<T> one_norm<T>(ConstMatrixView<T>);                                       \
    template real_t<T> frobenius_norm<T>(ConstMatrixView<T>);                                 \
    template real_t<T> norm2<T>(std::span<const T>);                                          \
    template real_t<T> off_norm<T>(ConstMatrixView<T>);                                       \
    template QrFactors<T> householder_qr<T>(ConstMatrixView<T>);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
