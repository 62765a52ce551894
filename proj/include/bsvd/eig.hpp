#pragma once

#include <functional>
#include <vector>

#include <bsvd/matrix.hpp>

namespace bsvd {

/// Complex plane rotation in the (i,j) plane:
///
///     J = [ c              -phase * s ]
///         [ conj(phase)*s   c         ]
///
/// with phase = e^{i*phi}, phi = arg(a_ij). For real fields phase is +-1.
/// J^H [a_ii a_ij; conj(a_ij) a_jj] J is diagonal.
template <Scalar T>
struct Rotation {
    real_t<T> c = 1;
    real_t<T> s = 0;
    T phase     = T(1);
    real_t<T> t = 0; ///< tan(theta), the smaller root
};

/// Rotation annihilating a_ij in the 2x2 Hermitian block [[a_ii, a_ij], [conj(a_ij), a_jj]].
/// a_ij == 0 gives the identity.
template <Scalar T>
Rotation<T> compute_rotation(real_t<T> a_ii, real_t<T> a_jj, T a_ij);

struct EigOptions {
    double k       = 30.0; ///< threshold multiplier
    int max_sweeps = 30;   ///< sweep budget; 1 gives the single-sweep inexact mode
};

struct EigInfo {
    bool converged          = false;
    int sweeps_run          = 0;
    long rotations_applied  = 0;

    friend bool operator==(const EigInfo &, const EigInfo &) = default;
};

template <Scalar T>
struct EigResult {
    std::vector<real_t<T>> eigenvalues; ///< diagonal after rotation, unsorted
    Matrix<T> vectors;                  ///< accumulated rotations, M^H G M ~ diag
    EigInfo info;
};

/// Called before each rotation with the working matrix, pair and rotation.
template <Scalar T>
using RotationObserver =
    std::function<void(ConstMatrixView<T> G, index_t i, index_t j, const Rotation<T> &)>;

/// Pair (i,j) is rotated iff |g_ij| >= k*u*sqrt(|g_ii*g_jj|) and g_ij != 0.
template <Scalar T>
bool exceeds_threshold(real_t<T> g_ii, real_t<T> g_jj, T g_ij, double k);

/// Two-sided cyclic Jacobi on a Hermitian matrix; pairs visited in
/// round-robin order. G is not modified.
///
/// With max_sweeps == 1, `converged` means the single sweep applied no
/// rotation, i.e. G already met the threshold everywhere.
///
/// Throws ShapeError for non-square G and DomainError when G is not
/// Hermitian to within 4u*||G||_F.
template <Scalar T>
EigResult<T> jacobi_hermitian_eig(ConstMatrixView<T> G, const EigOptions &opts = {},
                                  const RotationObserver<T> &observer = {});

/// Same algorithm working in place: G is overwritten by M^H G M and M (n x n)
/// is overwritten with the rotations. No input validation; used by the SVD
/// inner loop where G is Hermitian by construction.
template <Scalar T>
EigInfo jacobi_eig_inplace(MatrixView<T> G, MatrixView<T> M, const EigOptions &opts,
                           const RotationObserver<T> &observer = {});

} // namespace bsvd
