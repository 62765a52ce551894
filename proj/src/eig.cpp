#include <bsvd/eig.hpp>

#include <cmath>

#include <bsvd/kernels.hpp>
#include <bsvd/ordering.hpp>

#include "wide.hpp"

namespace bsvd {

template <Scalar T>
Rotation<T> compute_rotation(real_t<T> a_ii, real_t<T> a_jj, T a_ij) {
    using R = real_t<T>;
    Rotation<T> rot;
    const R mag = std::abs(a_ij);
    if (mag == R(0))
        return rot;
    rot.phase   = a_ij / T(mag);
    const R tau = (a_ii - a_jj) / (R(2) * mag);
    const R sgn = std::signbit(tau) ? R(-1) : R(1); // sign(0) = +1
    rot.t       = sgn / (std::abs(tau) + std::hypot(R(1), tau));
    rot.c       = R(1) / std::hypot(R(1), rot.t);
    rot.s       = rot.t * rot.c;
    return rot;
}

template <Scalar T>
bool exceeds_threshold(real_t<T> g_ii, real_t<T> g_jj, T g_ij, double k) {
    using R       = real_t<T>;
    const R mag   = std::abs(g_ij);
    const R bound = static_cast<R>(k) * unit_roundoff<T>() * std::sqrt(std::abs(g_ii * g_jj));
    return mag != R(0) && mag >= bound;
}

namespace {

using detail::narrow;
using detail::wide_rotation;
using detail::wide_t;
using detail::WideRotation;

// Rotations accumulated in the widened type, column-major n x n.
template <class T>
class WideAccumulator {
  public:
    using W = wide_t<T>;
    explicit WideAccumulator(ConstMatrixView<T> M) : rows_(M.rows), m_(M.rows * M.cols) {
        for (index_t c = 0; c < M.cols; ++c)
            for (index_t r = 0; r < rows_; ++r)
                m_[c * rows_ + r] = static_cast<W>(M(r, c));
    }
    void rotate(index_t i, index_t j, const WideRotation<T> &rot) {
        detail::rotate_pair<T>(m_.data() + i * rows_, m_.data() + j * rows_, rows_, rot);
    }
    void store(MatrixView<T> M) const {
        for (index_t c = 0; c < M.cols; ++c)
            for (index_t r = 0; r < rows_; ++r)
                M(r, c) = static_cast<T>(m_[c * rows_ + r]);
    }

  private:
    index_t rows_;
    std::vector<W> m_;
};

// G <- J^H G J on rows/cols i, j.
template <class T>
void apply_rotation(MatrixView<T> G, index_t i, index_t j, const Rotation<T> &rot) {
    using R       = real_t<T>;
    const R c     = rot.c;
    const T ps    = rot.phase * rot.s;       // phase * s
    const T cps   = conj(rot.phase) * rot.s; // conj(phase) * s
    const index_t n = G.rows;

    const R mag  = std::abs(G(i, j));
    const R a_ii = real_part(G(i, i));
    const R a_jj = real_part(G(j, j));

    for (index_t k = 0; k < n; ++k) {
        if (k == i || k == j)
            continue;
        const T gki = G(k, i);
        const T gkj = G(k, j);
        const T ni  = c * gki + cps * gkj;
        const T nj  = c * gkj - ps * gki;
        G(k, i)     = ni;
        G(k, j)     = nj;
        G(i, k)     = conj(ni);
        G(j, k)     = conj(nj);
    }
    G(i, i) = T(a_ii + rot.t * mag);
    G(j, j) = T(a_jj - rot.t * mag);
    G(i, j) = T(0);
    G(j, i) = T(0);
}

} // namespace

template <Scalar T>
EigInfo jacobi_eig_inplace(MatrixView<T> G, MatrixView<T> M, const EigOptions &opts,
                           const RotationObserver<T> &observer) {
    if (opts.max_sweeps < 1)
        throw DomainError("jacobi_eig: max_sweeps must be >= 1");
    EigInfo info;
    const index_t n = G.rows;
    if (n < 2) {
        info.converged  = true;
        info.sweeps_run = 1;
        return info;
    }
    const Schedule sched = round_robin_schedule(n);
    WideAccumulator<T> acc(M);
    while (!info.converged && info.sweeps_run < opts.max_sweeps) {
        info.converged = true;
        ++info.sweeps_run;
        for (const auto &iteration : sched.iterations)
            for (const auto [i, j] : iteration) {
                const T gij    = G(i, j);
                const auto gii = real_part(G(i, i));
                const auto gjj = real_part(G(j, j));
                if (!exceeds_threshold<T>(gii, gjj, gij, opts.k))
                    continue;
                info.converged = false;
                const auto wrot = wide_rotation<T>(gii, gjj, gij);
                const auto rot  = narrow<T>(wrot);
                if (observer)
                    observer(G, i, j, rot);
                apply_rotation(G, i, j, rot);
                acc.rotate(i, j, wrot);
                ++info.rotations_applied;
            }
    }
    acc.store(M);
    return info;
}

template <Scalar T>
EigResult<T> jacobi_hermitian_eig(ConstMatrixView<T> G, const EigOptions &opts,
                                  const RotationObserver<T> &observer) {
    using R = real_t<T>;
    if (G.rows != G.cols)
        throw ShapeError("jacobi_hermitian_eig: matrix is not square");
    const index_t n = G.rows;
    const R tol     = R(4) * unit_roundoff<T>() * frobenius_norm<T>(G);

    Matrix<T> W = to_matrix<T>(G);
    for (index_t q = 0; q < n; ++q) {
        if (std::abs(W(q, q) - conj(W(q, q))) / R(2) > tol)
            throw DomainError("jacobi_hermitian_eig: diagonal is not real");
        W(q, q) = T(real_part(W(q, q)));
        for (index_t p = 0; p < q; ++p) {
            if (std::abs(W(p, q) - conj(W(q, p))) > tol)
                throw DomainError("jacobi_hermitian_eig: matrix is not Hermitian");
            W(q, p) = conj(W(p, q));
        }
    }

    EigResult<T> out;
    out.vectors = Matrix<T>::identity(n);
    out.info    = jacobi_eig_inplace<T>(W.view(), out.vectors.view(), opts, observer);
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    for (index_t q = 0; q < n; ++q)
        out.eigenvalues[q] = real_part(W(q, q));
    return out;
}

#define BSVD_INSTANTIATE(T)                                                                 \
    template Rotation<T> compute_rotation<T>(real_t<T>, real_t<T>, T);                      \
    template bool exceeds_threshold<T>(real_t<T>, real_t<T>, T, double);                    \
    template EigInfo jacobi_eig_inplace<T>(MatrixView<T>, MatrixView<T>, const EigOptions &, \
                                           const RotationObserver<T> &);                    \
    template EigResult<T> jacobi_hermitian_eig<T>(ConstMatrixView<T>, const EigOptions &,   \
                                                  const RotationObserver<T> &);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
