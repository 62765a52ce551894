#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace bsvd {

using index_t = std::ptrdiff_t;

/// Thrown when operand shapes do not conform.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an input lies outside an operation's mathematical domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
concept Scalar = std::is_same_v<T, float> || std::is_same_v<T, double> ||
                 std::is_same_v<T, std::complex<float>> ||
                 std::is_same_v<T, std::complex<double>>;

/// Per-field properties. Unit roundoff is u = 2^-s with s the significand
/// width including the implicit bit.
template <Scalar T>
struct scalar_traits {
    using real_type = T;
    static constexpr bool complex = false;
};
template <class R>
struct scalar_traits<std::complex<R>> {
    using real_type = R;
    static constexpr bool complex = true;
};

template <Scalar T>
using real_t = typename scalar_traits<T>::real_type;

template <Scalar T>
constexpr int significand_bits() {
    return std::numeric_limits<real_t<T>>::digits;
}

template <Scalar T>
constexpr real_t<T> unit_roundoff() {
    // 2^-24 for single, 2^-53 for double
    return std::numeric_limits<real_t<T>>::epsilon() / 2;
}

template <class T>
constexpr T conj(T x) {
    if constexpr (is_complex_v<T>)
        return std::conj(x);
    else
        return x;
}

/// |x|^2 without the square root.
template <class T>
constexpr auto abs2(T x) {
    if constexpr (is_complex_v<T>)
        return x.real() * x.real() + x.imag() * x.imag();
    else
        return x * x;
}

template <class T>
auto magnitude(T x) {
    return std::abs(x);
}

/// arg(x); 0 or pi for real fields.
template <class T>
auto argument(T x) {
    if constexpr (is_complex_v<T>)
        return std::arg(x);
    else
        return x < T(0) ? std::numbers::pi_v<T> : T(0);
}

template <class T>
constexpr auto real_part(T x) {
    if constexpr (is_complex_v<T>)
        return x.real();
    else
        return x;
}

template <class T>
bool is_finite(T x) {
    if constexpr (is_complex_v<T>)
        return std::isfinite(x.real()) && std::isfinite(x.imag());
    else
        return std::isfinite(x);
}

/// Element type widened to double precision, preserving the field.
template <Scalar T>
using widened_t = std::conditional_t<is_complex_v<T>, std::complex<double>, double>;

enum class Dtype : std::uint8_t {
    real_single = 0,
    real_double = 1,
    complex_single = 2,
    complex_double = 3,
};

template <Scalar T>
constexpr Dtype dtype_of() {
    if constexpr (std::is_same_v<T, float>)
        return Dtype::real_single;
    else if constexpr (std::is_same_v<T, double>)
        return Dtype::real_double;
    else if constexpr (std::is_same_v<T, std::complex<float>>)
        return Dtype::complex_single;
    else
        return Dtype::complex_double;
}

/// LAPACK-style letter: s, d, c, z.
char dtype_letter(Dtype d);
Dtype dtype_from_letter(char c);
bool dtype_is_double(Dtype d);
/// k*u for the dtype's unit roundoff.
double dtype_threshold(Dtype d, double k = 30.0);

} // namespace bsvd
