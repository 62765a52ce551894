#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <bsvd/kernels.hpp>
#include <bsvd/matgen.hpp>
#include <bsvd/matrix.hpp>

namespace testing {

using bsvd::index_t;
using bsvd::Matrix;
using cfloat  = std::complex<float>;
using cdouble = std::complex<double>;

/// Standard-normal entries (both parts for complex).
template <class T>
Matrix<T> normal_matrix(index_t m, index_t n, std::uint64_t seed) {
    bsvd::Rng rng(bsvd::mix_seed(seed));
    Matrix<T> A(m, n);
    for (auto &x : A.elements()) {
        if constexpr (bsvd::is_complex_v<T>) {
            const double re = rng.normal();
            const double im = rng.normal();
            x = T(re, im);
        } else {
            x = static_cast<T>(rng.normal());
        }
    }
    return A;
}

template <class T>
Matrix<T> hermitian_matrix(index_t n, std::uint64_t seed) {
    Matrix<T> B = normal_matrix<T>(n, n, seed);
    Matrix<T> G(n, n);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i < n; ++i)
            G(i, j) = B(i, j) + bsvd::conj(B(j, i));
    for (index_t i = 0; i < n; ++i)
        G(i, i) = T(bsvd::real_part(G(i, i)));
    return G;
}

template <class T>
double max_abs_diff(const Matrix<T> &A, const Matrix<T> &B) {
    double d = 0;
    for (index_t j = 0; j < A.cols(); ++j)
        for (index_t i = 0; i < A.rows(); ++i)
            d = std::max(d, static_cast<double>(bsvd::magnitude(A(i, j) - B(i, j))));
    return d;
}

template <class R>
double max_abs_diff(const std::vector<R> &a, const std::vector<R> &b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    return d;
}

/// ||I - Q^H Q||_max in double.
template <class T>
double orthogonality_gap(const Matrix<T> &Q) {
    using W        = bsvd::widened_t<T>;
    const auto Qw  = bsvd::convert<W>(Q);
    const auto QtQ = bsvd::multiply<W>(Qw.view(), bsvd::Op::conj_trans, Qw.view());
    double d = 0;
    for (index_t j = 0; j < QtQ.cols(); ++j)
        for (index_t i = 0; i < QtQ.rows(); ++i)
            d = std::max(d, std::abs(QtQ(i, j) - W(i == j ? 1.0 : 0.0)));
    return d;
}

/// Removes itself on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &)            = delete;
    TempDir &operator=(const TempDir &) = delete;

    std::filesystem::path file(const std::string &name) const { return dir_ / name; }

  private:
    std::filesystem::path dir_;
};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &p);
void write_bytes(const std::filesystem::path &p, const std::vector<std::uint8_t> &bytes);

/// The 8x8 matrix of the block-Jacobi worked example, entries to 4 decimals.
Matrix<double> worked_example_matrix();

} // namespace testing
