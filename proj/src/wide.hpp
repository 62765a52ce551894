#pragma once

// Widened-precision rotation helpers shared by the eigensolver and the
// unblocked SVD sweep: float work is done in double, double in long double.

#include <cmath>
#include <complex>

#include <bsvd/eig.hpp>

namespace bsvd::detail {

template <class T>
struct widen {
    using type = long double;
};
template <>
struct widen<float> {
    using type = double;
};
template <class R>
struct widen<std::complex<R>> {
    using type = std::complex<typename widen<R>::type>;
};
template <class T>
using wide_t = typename widen<T>::type;

template <Scalar T>
struct WideRotation {
    using W = wide_t<T>;
    using R = wide_t<real_t<T>>;
    R c = 1, s = 0, t = 0;
    W phase = W(1);
};

template <Scalar T>
WideRotation<T> wide_rotation(real_t<T> g_ii, real_t<T> g_jj, T g_ij) {
    using W = wide_t<T>;
    using R = wide_t<real_t<T>>;
    const R a_ii = g_ii, a_jj = g_jj;
    const W a_ij = static_cast<W>(g_ij);
    WideRotation<T> rot;
    const R mag = std::abs(a_ij);
    if (mag == R(0))
        return rot;
    rot.phase   = a_ij / W(mag);
    const R tau = (a_ii - a_jj) / (R(2) * mag);
    const R sgn = std::signbit(tau) ? R(-1) : R(1);
    rot.t       = sgn / (std::abs(tau) + std::hypot(R(1), tau));
    rot.c       = R(1) / std::hypot(R(1), rot.t);
    rot.s       = rot.t * rot.c;
    return rot;
}

template <Scalar T>
Rotation<T> narrow(const WideRotation<T> &w) {
    return {static_cast<real_t<T>>(w.c), static_cast<real_t<T>>(w.s), static_cast<T>(w.phase),
            static_cast<real_t<T>>(w.t)};
}

/// a*b without the C99 inf/nan recovery that std::complex multiplication
/// goes through (it is not inlined for long double).
template <class X>
X plain_mul(X a, X b) {
    if constexpr (is_complex_v<X>)
        return {a.real() * b.real() - a.imag() * b.imag(),
                a.real() * b.imag() + a.imag() * b.real()};
    else
        return a * b;
}

/// x <- c x + conj(phase) s y, y <- c y - phase s x over `len` entries,
/// evaluated in the widened type. X is T or wide_t<T>.
template <Scalar T, class X>
void rotate_pair(X *x, X *y, index_t len, const WideRotation<T> &rot) {
    using W     = wide_t<T>;
    const W ps  = rot.phase * rot.s;
    const W cps = conj(rot.phase) * rot.s;
    for (index_t r = 0; r < len; ++r) {
        const W xr = static_cast<W>(x[r]);
        const W yr = static_cast<W>(y[r]);
        x[r]       = static_cast<X>(rot.c * xr + plain_mul(cps, yr));
        y[r]       = static_cast<X>(rot.c * yr - plain_mul(ps, xr));
    }
}

} // namespace bsvd::detail
