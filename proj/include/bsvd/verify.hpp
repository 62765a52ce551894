#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <bsvd/svd.hpp>

namespace bsvd {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// e1 = ||A - U S V^H||_1 / (n ||A||_1), evaluated in double precision.
/// Requires V; throws ShapeError when it is absent or shapes disagree.
template <Scalar T>
double residual_e1(const Matrix<T> &A, const SvdResult<T> &r);

/// (e2, e3) = (||I - U^H U||_1 / m, ||I - V^H V||_1 / n). e3 is 0 when V is absent.
template <Scalar T>
std::pair<double, double> orthogonality_e2_e3(const SvdResult<T> &r);

/// ||sigma - sigma_ref||_F / min(m, n).
double sigma_error_e4(std::span<const double> sigma, std::span<const double> sigma_ref,
                      index_t m, index_t n);

/// Non-strict descending order check.
bool is_descending(std::span<const double> sigma);

/// Reference singular values: unblocked one-sided Jacobi in double precision
/// with k = 1 and a 100-sweep budget. Throws OracleError if it does not
/// converge or its own factorization fails e1..e3 at 30*u(double).
template <Scalar T>
std::vector<double> oracle_svd(const Matrix<T> &A);

struct ErrorReport {
    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    double threshold    = 0; ///< k*u of the working precision
    double e3_threshold = 0; ///< may be relaxed for known exceedances
    bool has_v   = false;
    bool has_ref = false;
    bool sorted  = false;

    bool pass_e1() const { return !has_v || e1 < threshold; }
    bool pass_e2() const { return e2 < threshold; }
    bool pass_e3() const { return !has_v || e3 < e3_threshold; }
    bool pass_e4() const { return !has_ref || e4 < threshold; }
    bool passes() const { return pass_e1() && pass_e2() && pass_e3() && pass_e4() && sorted; }
};

template <Scalar T>
std::vector<double> widen_sigma(const std::vector<real_t<T>> &s) {
    return {s.begin(), s.end()};
}

/// All four metrics plus the ordering check. `sigma_ref` may be empty.
template <Scalar T>
ErrorReport evaluate(const Matrix<T> &A, const SvdResult<T> &r,
                     std::span<const double> sigma_ref, double k = 30.0,
                     double e3_factor = 1.0);

} // namespace bsvd
