#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <bsvd/matrix.hpp>

namespace bsvd {

enum class Family { random, arith, cluster0, cluster1, logrand, geo };

const char *to_string(Family f);
Family family_from_string(const std::string &name);
inline constexpr Family all_families[] = {Family::random,   Family::arith,   Family::cluster0,
                                          Family::cluster1, Family::logrand, Family::geo};

struct SpectrumSpec {
    Family family      = Family::random;
    double kappa       = 1.0;
    index_t n          = 0;
    std::uint64_t seed = 0;
};

/// Deterministic source of uniform and standard-normal variates.
///
/// Engine is std::mt19937_64. Uniforms take the top 53 bits of one draw,
/// u = (x >> 11) * 2^-53, on [0,1). Normals use the Box-Muller transform on
/// two such uniforms (the first mapped to (0,1]); the sine branch is cached.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();
    double normal();

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_   = 0;
};

/// SplitMix64 finalizer; derives independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Prescribed singular values, descending, with sigma_1 = 1 and
/// sigma_n = 1/kappa where the family defines both ends. logrand draws the
/// interior values log-uniformly and pins the end points.
std::vector<double> make_sigma(const SpectrumSpec &spec);

/// m x n factor with orthonormal columns: Q of a Householder QR of a
/// standard-normal matrix (complex normal for complex fields).
template <Scalar T>
Matrix<T> random_orthonormal(index_t m, index_t n, Rng &rng);

/// One test matrix. `random`: i.i.d. uniform [0,1] entries (both parts for
/// complex). Other families: U diag(sigma) V^H built in double precision and
/// rounded to T.
template <Scalar T>
Matrix<T> gen_matrix(index_t m, const SpectrumSpec &spec);

/// `count` matrices; matrix b uses seed mix_seed(spec.seed + b).
template <Scalar T>
std::vector<Matrix<T>> gen_batch(index_t m, const SpectrumSpec &spec, index_t count);

} // namespace bsvd
