#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <bsvd/eig.hpp>
#include <bsvd/kernels.hpp>
#include <bsvd/ordering.hpp>

namespace bsvd {

struct JacobiOptions {
    double k          = 30.0; ///< threshold is k*u
    int max_nsweeps   = 30;   ///< outer sweep budget
    index_t nb        = 16;   ///< block width
    int inner_sweeps  = 1;    ///< inner eigensolver budget; 0 runs it to convergence
    bool fused_update = true; ///< single-pass pair update instead of two GEMM stages
    bool masking      = true; ///< skip converged problems in a batch
    bool use_qr_preprocess     = false;
    bool compute_right_vectors = true;
    bool parallel     = true; ///< OpenMP over pairs / row tiles / problems
    index_t small_cutoff = 32; ///< min(m,n) at or below this goes unblocked
    double qr_ratio      = 3;  ///< m/n at or above this takes the QR path when enabled
    index_t row_block    = 64; ///< tile height of the fused update
    bool wide_dots       = false; ///< unblocked path: column dots accumulated in long double

    void validate() const;
};

/// Sweep budget used when inner_sweeps == 0.
inline constexpr int inner_to_convergence_sweeps = 100;

enum class SolverPath : std::uint8_t { empty, unblocked, blocked, qr_unblocked, qr_blocked };
const char *to_string(SolverPath p);

struct SvdInfo {
    bool converged          = false;
    int outer_sweeps        = 0;
    long inner_rotations    = 0;
    long masked_pair_skips  = 0;
    SolverPath path         = SolverPath::empty;
    bool transposed         = false;

    friend bool operator==(const SvdInfo &, const SvdInfo &) = default;
};

template <Scalar T>
struct SvdResult {
    std::vector<real_t<T>> sigma; ///< descending, length min(m,n)
    Matrix<T> U;                  ///< m x min(m,n)
    Matrix<T> V;                  ///< n x min(m,n); 0 x 0 when not requested
    SvdInfo info;
};

/// Work tallies; summed over problems in a batch.
struct WorkCounters {
    long gram_calls        = 0;
    long eig_calls         = 0;
    long update_calls      = 0;
    long masked_pair_skips = 0;

    WorkCounters &operator+=(const WorkCounters &o) {
        gram_calls += o.gram_calls;
        eig_calls += o.eig_calls;
        update_calls += o.update_calls;
        masked_pair_skips += o.masked_pair_skips;
        return *this;
    }
};

/// Time per stage category in seconds, summed over worker threads.
struct StageTimes {
    double aux  = 0;
    double gram = 0;
    double eig  = 0;
    double vec  = 0;

    double total() const { return aux + gram + eig + vec; }
    StageTimes &operator+=(const StageTimes &o) {
        aux += o.aux;
        gram += o.gram;
        eig += o.eig;
        vec += o.vec;
        return *this;
    }
};

/// Hermitian Gram matrix [Ai Aj]^H [Ai Aj] from the three products
/// Ai^H Ai, Aj^H Ai, Aj^H Aj; the upper block is mirrored, the diagonal is real.
template <Scalar T>
Matrix<T> compute_gram(ConstMatrixView<T> Ai, ConstMatrixView<T> Aj);

/// [Bi Bj] <- [Bi Bj] * J, row tile by row tile. Each tile of Bi and Bj is
/// read once and the products accumulate before a single store. Bj may have
/// zero width.
template <Scalar T>
void fused_pair_update(MatrixView<T> Bi, MatrixView<T> Bj, ConstMatrixView<T> J,
                       index_t row_block = 64, bool parallel = true);

/// Two-stage update through full-size temporaries, the baseline form:
///   stage 1: Ti = Bi*J11, Tj = Bi*J12;  stage 2: Ti += Bj*J21, Tj += Bj*J22.
template <Scalar T>
void two_stage_pair_update(MatrixView<T> Bi, MatrixView<T> Bj, ConstMatrixView<T> J);

/// Singular values as column norms, normalized U, stable descending sort.
/// Columns with norm below smallest-normal/u get sigma = 0 and an
/// orthonormal completion in U. V (n x n, may be empty) is permuted alike.
template <Scalar T>
SvdResult<T> finalize(Matrix<T> workA, Matrix<T> V);

template <Scalar T>
SvdResult<T> svd_unblocked(const Matrix<T> &A, const JacobiOptions &opts = {});

template <Scalar T>
SvdResult<T> svd_blocked(const Matrix<T> &A, const JacobiOptions &opts = {});

template <Scalar T>
SvdResult<T> svd_qr_preprocessed(const Matrix<T> &A, const JacobiOptions &opts = {});

/// Picks the path: wide inputs are solved through A^H; QR preprocessing when
/// enabled and m/n >= qr_ratio; unblocked when min(m,n) <= small_cutoff;
/// otherwise blocked.
template <Scalar T>
SvdResult<T> svd_dispatch(const Matrix<T> &A, const JacobiOptions &opts = {},
                          WorkCounters *counters = nullptr, StageTimes *times = nullptr);

/// Per-pair hook for instrumented runs: the Gram before the inner solve,
/// the rotations applied, and the pair's block indices.
template <Scalar T>
using PairObserver = std::function<void(index_t bi, index_t bj, ConstMatrixView<T> gram_before,
                                        ConstMatrixView<T> J, const EigInfo &)>;

/// Iterative state of one SVD problem, advanced one outer sweep at a time.
/// Standalone solves and the batch driver share this.
template <Scalar T>
class JacobiProblem {
  public:
    enum class Route { automatic, unblocked, blocked, qr };

    JacobiProblem(const Matrix<T> &A, const JacobiOptions &opts, Route route = Route::automatic);

    /// Runs one outer sweep; returns the number of inner rotations applied.
    /// A sweep that applies none marks the problem converged.
    long sweep(WorkCounters &counters, StageTimes *times = nullptr);

    bool converged() const { return info_.converged; }
    int sweeps() const { return info_.outer_sweeps; }
    bool exhausted() const { return info_.outer_sweeps >= opts_.max_nsweeps; }
    bool done() const { return converged() || exhausted(); }
    /// Pair tasks in one sweep of the active path.
    long pairs_per_sweep() const;
    void record_masked_skip(long pairs) { info_.masked_pair_skips += pairs; }
    const std::vector<EigInfo> &last_pair_info() const { return last_pair_info_; }
    SolverPath path() const { return info_.path; }

    /// Working matrix A^(k) (of A, A^H, or R, depending on the path).
    const Matrix<T> &working() const { return work_; }

    void set_pair_observer(PairObserver<T> obs) { pair_observer_ = std::move(obs); }

    SvdResult<T> finish(StageTimes *times = nullptr) &&;

  private:
    long sweep_unblocked(WorkCounters &counters, StageTimes *times);
    long sweep_blocked(WorkCounters &counters, StageTimes *times);

    JacobiOptions opts_;
    SvdInfo info_;
    index_t orig_rows_ = 0, orig_cols_ = 0;
    bool want_v_       = true; ///< accumulate V on the working problem
    Matrix<T> work_;
    Matrix<T> v_;
    Matrix<T> q_; ///< QR path only
    Schedule schedule_;
    std::vector<index_t> block_start_, block_width_;
    std::vector<EigInfo> last_pair_info_;
    PairObserver<T> pair_observer_;
};

/// Runs sweeps until convergence or the budget runs out, then finalizes.
template <Scalar T>
SvdResult<T> solve(JacobiProblem<T> problem, WorkCounters *counters = nullptr,
                   StageTimes *times = nullptr);

} // namespace bsvd
