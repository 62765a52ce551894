#include <bsvd/matgen.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <bsvd/kernels.hpp>

namespace bsvd {

const char *to_string(Family f) {
    switch (f) {
    case Family::random: return "random";
    case Family::arith: return "arith";
    case Family::cluster0: return "cluster0";
    case Family::cluster1: return "cluster1";
    case Family::logrand: return "logrand";
    case Family::geo: return "geo";
    }
    return "?";
}

Family family_from_string(const std::string &name) {
    for (Family f : all_families)
        if (name == to_string(f))
            return f;
    throw DomainError("unknown matrix family '" + name + "'");
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0,1]
    const double u2 = uniform();
    const double r  = std::sqrt(-2.0 * std::log(u1));
    const double a  = 2.0 * std::numbers::pi * u2;
    spare_          = r * std::sin(a);
    has_spare_      = true;
    return r * std::cos(a);
}

std::vector<double> make_sigma(const SpectrumSpec &spec) {
    const index_t n = spec.n;
    if (n < 1)
        throw DomainError("make_sigma: n must be >= 1");
    if (!(spec.kappa >= 1.0))
        throw DomainError("make_sigma: kappa must be >= 1");
    const double kappa = spec.kappa;
    std::vector<double> s(static_cast<std::size_t>(n));

    switch (spec.family) {
    case Family::random:
        throw DomainError("make_sigma: the random family has data-dependent singular values");
    case Family::arith:
        if (n < 2)
            throw DomainError("make_sigma: arith needs n >= 2");
        for (index_t i = 0; i < n; ++i)
            s[i] = 1.0 - (static_cast<double>(i) / static_cast<double>(n - 1)) * (1.0 - 1.0 / kappa);
        break;
    case Family::cluster0:
        std::fill(s.begin(), s.end(), 1.0 / kappa);
        s[0] = 1.0;
        break;
    case Family::cluster1:
        std::fill(s.begin(), s.end(), 1.0);
        s[n - 1] = n > 1 ? 1.0 / kappa : 1.0;
        break;
    case Family::logrand: {
        Rng rng(mix_seed(spec.seed ^ 0x5157u));
        const double lo = -std::log(kappa);
        for (auto &x : s)
            x = std::exp(lo * (1.0 - rng.uniform()));
        std::sort(s.begin(), s.end(), std::greater<>());
        s.front() = 1.0;
        if (n > 1)
            s.back() = 1.0 / kappa;
        break;
    }
    case Family::geo:
        if (n < 2)
            throw DomainError("make_sigma: geo needs n >= 2");
        for (index_t i = 0; i < n; ++i)
            s[i] = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
        break;
    }
    return s;
}

namespace {

template <class T>
T draw_normal(Rng &rng) {
    if constexpr (is_complex_v<T>) {
        const double re = rng.normal();
        const double im = rng.normal();
        return T(re, im);
    } else {
        return T(rng.normal());
    }
}

template <class T>
T draw_uniform(Rng &rng) {
    if constexpr (is_complex_v<T>) {
        const double re = rng.uniform();
        const double im = rng.uniform();
        return T(static_cast<real_t<T>>(re), static_cast<real_t<T>>(im));
    } else {
        return static_cast<T>(rng.uniform());
    }
}

} // namespace

template <Scalar T>
Matrix<T> random_orthonormal(index_t m, index_t n, Rng &rng) {
    if (m < n)
        throw ShapeError("random_orthonormal: requires rows >= cols");
    Matrix<T> G(m, n);
    for (auto &x : G.elements())
        x = draw_normal<T>(rng);
    return householder_qr<T>(G.view()).Q;
}

template <Scalar T>
Matrix<T> gen_matrix(index_t m, const SpectrumSpec &spec) {
    if (spec.n < 1 || m < spec.n)
        throw ShapeError("gen_matrix: requires m >= n >= 1");
    const index_t n = spec.n;
    if (spec.family == Family::random) {
        Rng rng(mix_seed(spec.seed));
        Matrix<T> A(m, n);
        for (index_t j = 0; j < n; ++j)
            for (index_t i = 0; i < m; ++i)
                A(i, j) = draw_uniform<T>(rng);
        return A;
    }

    using W                 = widened_t<T>;
    const std::vector<double> sigma = make_sigma(spec);
    Rng rng_u(mix_seed(spec.seed ^ 0x0055u));
    Rng rng_v(mix_seed(spec.seed ^ 0x0056u));
    Matrix<W> U = random_orthonormal<W>(m, n, rng_u);
    Matrix<W> V = random_orthonormal<W>(n, n, rng_v);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i < m; ++i)
            U(i, j) *= sigma[j];
    Matrix<W> A = multiply<W>(U.view(), Op::none, V.view(), Op::conj_trans);
    return convert<T>(A);
}

template <Scalar T>
std::vector<Matrix<T>> gen_batch(index_t m, const SpectrumSpec &spec, index_t count) {
    std::vector<Matrix<T>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (index_t b = 0; b < count; ++b) {
        SpectrumSpec s = spec;
        s.seed         = mix_seed(spec.seed + static_cast<std::uint64_t>(b));
        out.push_back(gen_matrix<T>(m, s));
    }
    return out;
}

#define BSVD_INSTANTIATE(T)                                                          \
    template Matrix<T> random_orthonormal<T>(index_t, index_t, Rng &);               \
    template Matrix<T> gen_matrix<T>(index_t, const SpectrumSpec &);                 \
    template std::vector<Matrix<T>> gen_batch<T>(index_t, const SpectrumSpec &, index_t);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
