#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <bsvd/bsvd_file.hpp>
#include <bsvd/matgen.hpp>
#include <bsvd/svd.hpp>

namespace bsvd {

enum class Design { baseline, design2, design3, design4 };

const char *to_string(Design d);
Design design_from_string(const std::string &name);
inline constexpr Design all_designs[] = {Design::baseline, Design::design2, Design::design3,
                                         Design::design4};

/// Sets inner_sweeps, fused_update and masking for the design; other fields
/// are left alone.
///   baseline: inner eigensolver to convergence, two-stage update, no masking
///   design2:  one inner sweep
///   design3:  design2 + fused update
///   design4:  design3 + masking
void apply_design(Design d, JacobiOptions &opts);

/// Default kappa for generated batches: 1e5 in single, 1e10 in double.
double default_kappa(Dtype dt);

struct GenConfig {
    Family family  = Family::random;
    index_t n      = 0;
    index_t m      = 0; ///< 0 means m = n
    std::optional<double> kappa;
    index_t batch      = 1;
    std::uint64_t seed = 1;
    Dtype dtype        = Dtype::real_double;
    std::filesystem::path out;
};

struct SolveConfig {
    std::filesystem::path in;
    std::filesystem::path out; ///< results file; empty to skip writing
    JacobiOptions opts;
};

struct VerifyConfig {
    std::filesystem::path in;
    std::filesystem::path results; ///< from `solve`; empty to solve in place
    JacobiOptions opts;
    /// Prescribed singular values are used for e4 when the input was
    /// generated from a non-random family with these parameters; otherwise
    /// the oracle supplies them.
    std::optional<Family> family;
    std::optional<double> kappa;
    std::uint64_t seed = 1;
};

struct BenchConfig {
    std::vector<Design> designs{all_designs, all_designs + 4};
    std::vector<index_t> sizes{64};
    index_t m          = 0; ///< 0 means square
    index_t batch      = 10;
    Family family      = Family::random;
    std::optional<double> kappa;
    std::uint64_t seed = 1;
    Dtype dtype        = Dtype::real_double;
    int repeats        = 10;
    JacobiOptions opts; ///< design fields are overwritten per row
};

/// Results are written as a BSVD file with 3 entries per problem:
/// U (m x r), sigma (r x 1, stored in the input dtype), V (n x r, or 0 x 0
/// when right vectors were not requested).
template <Scalar T>
std::vector<Matrix<T>> pack_results(const std::vector<SvdResult<T>> &results);
template <Scalar T>
std::vector<SvdResult<T>> unpack_results(const std::vector<Matrix<T>> &packed);

/// Each command returns a process exit code: 0 success, 1 failed check or
/// unconverged problems, 2 usage / input errors (reported on `err`).
int cmd_gen(const GenConfig &cfg, std::ostream &out, std::ostream &err);
int cmd_solve(const SolveConfig &cfg, std::ostream &out, std::ostream &err);
/// CSV, one row per distinct (m, n) in the input:
inline constexpr const char *verify_csv_header =
    "family,dtype,m,n,count,e1,e2,e3,e4,threshold,e3_threshold,"
    "pass_e1,pass_e2,pass_e3,pass_e4,sorted,converged";
int cmd_verify(const VerifyConfig &cfg, std::ostream &out, std::ostream &err);
/// CSV, one row per (size, design). Times are medians over the repeats in
/// seconds; stage times are summed over worker threads.
inline constexpr const char *bench_csv_header =
    "design,m,n,batch,dtype,repeats,wall_s,aux_s,gram_s,eig_s,vec_s,eig_fraction,"
    "gram_calls,eig_calls,update_calls,masked_pair_skips,sweeps";
int cmd_bench(const BenchConfig &cfg, std::ostream &out, std::ostream &err);

} // namespace bsvd
