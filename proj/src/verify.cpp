#include <bsvd/verify.hpp>

#include <algorithm>
#include <cmath>

namespace bsvd {

namespace {

template <class W>
double identity_gap(const Matrix<W> &Q) {
    // ||I - Q^H Q||_1
    Matrix<W> G = multiply<W>(Q.view(), Op::conj_trans, Q.view());
    for (index_t i = 0; i < G.rows(); ++i)
        G(i, i) -= W(1);
    return one_norm<W>(G.view());
}

} // namespace

template <Scalar T>
double residual_e1(const Matrix<T> &A, const SvdResult<T> &r) {
    using W         = widened_t<T>;
    const index_t m = A.rows(), n = A.cols();
    const auto rank = static_cast<index_t>(r.sigma.size());
    if (r.V.empty() && n > 0)
        throw ShapeError("residual_e1: right singular vectors are required");
    if (r.U.rows() != m || r.U.cols() != rank || r.V.rows() != n || r.V.cols() != rank)
        throw ShapeError("residual_e1: factor shapes do not match A");

    Matrix<W> Aw = convert<W>(A);
    Matrix<W> US = convert<W>(r.U);
    for (index_t j = 0; j < rank; ++j)
        for (index_t i = 0; i < m; ++i)
            US(i, j) *= static_cast<double>(r.sigma[j]);
    Matrix<W> Vw = convert<W>(r.V);
    gemm<W>(W(-1), US.view(), Op::none, Vw.view(), Op::conj_trans, W(1), Aw.view());
    const double resid = one_norm<W>(Aw.view());
    const double anorm = one_norm<W>(convert<W>(A).view());
    if (resid == 0)
        return 0;
    if (anorm == 0 || n == 0)
        return 1.0 / unit_roundoff<double>();
    return resid / (static_cast<double>(n) * anorm);
}

template <Scalar T>
std::pair<double, double> orthogonality_e2_e3(const SvdResult<T> &r) {
    using W  = widened_t<T>;
    double e2 = 0, e3 = 0;
    if (r.U.rows() > 0)
        e2 = identity_gap(convert<W>(r.U)) / static_cast<double>(r.U.rows());
    if (!r.V.empty() && r.V.rows() > 0)
        e3 = identity_gap(convert<W>(r.V)) / static_cast<double>(r.V.rows());
    return {e2, e3};
}

double sigma_error_e4(std::span<const double> sigma, std::span<const double> sigma_ref,
                      index_t m, index_t n) {
    if (sigma.size() != sigma_ref.size())
        throw ShapeError("sigma_error_e4: length mismatch");
    const index_t k = std::min(m, n);
    if (k <= 0)
        return 0;
    double ssq = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double d = sigma[i] - sigma_ref[i];
        ssq += d * d;
    }
    return std::sqrt(ssq) / static_cast<double>(k);
}

bool is_descending(std::span<const double> sigma) {
    return std::is_sorted(sigma.begin(), sigma.end(), std::greater<>());
}

template <Scalar T>
std::vector<double> oracle_svd(const Matrix<T> &A) {
    using W = widened_t<T>;
    JacobiOptions opts;
    opts.k                     = 1.0;
    opts.max_nsweeps           = 100;
    opts.small_cutoff          = std::numeric_limits<index_t>::max();
    opts.use_qr_preprocess     = false;
    opts.compute_right_vectors = true;
    opts.parallel              = false;
    opts.wide_dots             = true;

    const Matrix<W> Aw = convert<W>(A);
    SvdResult<W> r     = svd_dispatch<W>(Aw, opts);
    if (!r.info.converged)
        throw OracleError("oracle_svd: no convergence within 100 sweeps");

    const double bound = 30.0 * unit_roundoff<double>();
    const double e1    = residual_e1<W>(Aw, r);
    const auto [e2, e3] = orthogonality_e2_e3<W>(r);
    if (!(e1 < bound && e2 < bound && e3 < bound))
        throw OracleError("oracle_svd: reference factorization fails its own accuracy check");
    return r.sigma;
}

template <Scalar T>
ErrorReport evaluate(const Matrix<T> &A, const SvdResult<T> &r,
                     std::span<const double> sigma_ref, double k, double e3_factor) {
    ErrorReport rep;
    rep.threshold    = k * static_cast<double>(unit_roundoff<T>());
    rep.e3_threshold = rep.threshold * e3_factor;
    rep.has_v        = !r.V.empty() || A.cols() == 0;
    const auto sigma = widen_sigma<T>(r.sigma);
    rep.sorted       = is_descending(sigma);
    if (rep.has_v)
        rep.e1 = residual_e1<T>(A, r);
    std::tie(rep.e2, rep.e3) = orthogonality_e2_e3<T>(r);
    if (!sigma_ref.empty()) {
        rep.has_ref = true;
        rep.e4      = sigma_error_e4(sigma, sigma_ref, A.rows(), A.cols());
    }
    return rep;
}

#define BSVD_INSTANTIATE(T)                                                                  \
    template double residual_e1<T>(const Matrix<T> &, const SvdResult<T> &);                 \
    template std::pair<double, double> orthogonality_e2_e3<T>(const SvdResult<T> &);         \
    template std::vector<double> oracle_svd<T>(const Matrix<T> &);                           \
    template ErrorReport evaluate<T>(const Matrix<T> &, const SvdResult<T> &,                \
                                     std::span<const double>, double, double);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
