#include <bsvd/svd.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "wide.hpp"

namespace bsvd {

void JacobiOptions::validate() const {
    if (!(k > 0))
        throw DomainError("JacobiOptions: k must be positive");
    if (max_nsweeps < 1)
        throw DomainError("JacobiOptions: max_nsweeps must be >= 1");
    if (nb < 1)
        throw DomainError("JacobiOptions: nb must be >= 1");
    if (inner_sweeps < 0)
        throw DomainError("JacobiOptions: inner_sweeps must be >= 0");
    if (row_block < 1)
        throw DomainError("JacobiOptions: row_block must be >= 1");
    if (!(qr_ratio > 0))
        throw DomainError("JacobiOptions: qr_ratio must be positive");
    if (small_cutoff < 0)
        throw DomainError("JacobiOptions: small_cutoff must be >= 0");
}

const char *to_string(SolverPath p) {
    switch (p) {
    case SolverPath::empty: return "empty";
    case SolverPath::unblocked: return "unblocked";
    case SolverPath::blocked: return "blocked";
    case SolverPath::qr_unblocked: return "qr+unblocked";
    case SolverPath::qr_blocked: return "qr+blocked";
    }
    return "?";
}

namespace {

using clock_type = std::chrono::steady_clock;

class StageTimer {
  public:
    explicit StageTimer(double *slot) : slot_(slot) {
        if (slot_)
            start_ = clock_type::now();
    }
    ~StageTimer() {
        if (slot_)
            *slot_ += std::chrono::duration<double>(clock_type::now() - start_).count();
    }
    StageTimer(const StageTimer &)            = delete;
    StageTimer &operator=(const StageTimer &) = delete;

  private:
    double *slot_;
    clock_type::time_point start_;
};

template <class T>
bool all_finite(const Matrix<T> &A) {
    for (const T &x : A.elements())
        if (!is_finite(x))
            return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Pair kernels

template <Scalar T>
Matrix<T> compute_gram(ConstMatrixView<T> Ai, ConstMatrixView<T> Aj) {
    if (Aj.cols > 0 && Ai.rows != Aj.rows)
        throw ShapeError("compute_gram: block columns have different row counts");
    const index_t wi = Ai.cols, wj = Aj.cols, w = wi + wj;
    Matrix<T> G(w, w);
    auto Gv = G.view();
    gemm<T>(T(1), Ai, Op::conj_trans, Ai, Op::none, T(0), Gv.block(0, 0, wi, wi));
    if (wj > 0) {
        gemm<T>(T(1), Aj, Op::conj_trans, Ai, Op::none, T(0), Gv.block(wi, 0, wj, wi));
        gemm<T>(T(1), Aj, Op::conj_trans, Aj, Op::none, T(0), Gv.block(wi, wi, wj, wj));
    }
    // Lower triangle is authoritative; mirror it and clear diagonal imaginary parts.
    for (index_t q = 0; q < w; ++q) {
        G(q, q) = T(real_part(G(q, q)));
        for (index_t p = 0; p < q; ++p)
            G(p, q) = conj(G(q, p));
    }
    return G;
}

template <Scalar T>
void fused_pair_update(MatrixView<T> Bi, MatrixView<T> Bj, ConstMatrixView<T> J,
                       index_t row_block, bool parallel) {
    const index_t wi = Bi.cols, wj = Bj.cols, w = wi + wj;
    if (J.rows != w || J.cols != w)
        throw ShapeError("fused_pair_update: rotation block has the wrong order");
    if (wj > 0 && Bi.rows != Bj.rows)
        throw ShapeError("fused_pair_update: block columns have different row counts");
    if (row_block < 1)
        throw DomainError("fused_pair_update: row_block must be >= 1");
    const index_t m      = Bi.rows;
    const index_t rb     = std::min(row_block, std::max<index_t>(m, 1));
    const index_t ntiles = (m + rb - 1) / rb;
    [[maybe_unused]] const bool par = parallel && ntiles > 1;

#pragma omp parallel if (par)
    {
        std::vector<T> tile(static_cast<std::size_t>(rb * std::max(wi, wj)));
        std::vector<T> acc(static_cast<std::size_t>(rb * w));

        // acc[:, 0:w] += tile[:, 0:width] * J[row0:row0+width, 0:w]
        auto accumulate = [&](index_t h, index_t width, index_t row0) {
            for (index_t q = 0; q < w; ++q) {
                T *a = acc.data() + q * rb;
                for (index_t p = 0; p < width; ++p) {
                    const T jv   = J(row0 + p, q);
                    const T *src = tile.data() + p * rb;
                    for (index_t r = 0; r < h; ++r)
                        a[r] += src[r] * jv;
                }
            }
        };
        auto load = [&](MatrixView<T> B, index_t r0, index_t h) {
            for (index_t p = 0; p < B.cols; ++p)
                std::copy_n(B.data + r0 + p * B.ld, h, tile.data() + p * rb);
        };

#pragma omp for schedule(static)
        for (index_t t = 0; t < ntiles; ++t) {
            const index_t r0 = t * rb;
            const index_t h  = std::min(rb, m - r0);
            std::fill(acc.begin(), acc.end(), T(0));

            load(Bi, r0, h);
            accumulate(h, wi, 0);
            if (wj > 0) {
                load(Bj, r0, h);
                accumulate(h, wj, wi);
            }

            for (index_t q = 0; q < wi; ++q)
                std::copy_n(acc.data() + q * rb, h, Bi.data + r0 + q * Bi.ld);
            for (index_t q = 0; q < wj; ++q)
                std::copy_n(acc.data() + (wi + q) * rb, h, Bj.data + r0 + q * Bj.ld);
        }
    }
}

template <Scalar T>
void two_stage_pair_update(MatrixView<T> Bi, MatrixView<T> Bj, ConstMatrixView<T> J) {
    const index_t wi = Bi.cols, wj = Bj.cols, w = wi + wj;
    if (J.rows != w || J.cols != w)
        throw ShapeError("two_stage_pair_update: rotation block has the wrong order");
    if (wj > 0 && Bi.rows != Bj.rows)
        throw ShapeError("two_stage_pair_update: block columns have different row counts");
    const index_t m = Bi.rows;
    Matrix<T> Ti(m, wi), Tj(m, wj);
    ConstMatrixView<T> Bi_c = Bi, Bj_c = Bj;
    // stage 1
    gemm<T>(T(1), Bi_c, Op::none, J.block(0, 0, wi, wi), Op::none, T(0), Ti.view());
    if (wj > 0) {
        gemm<T>(T(1), Bi_c, Op::none, J.block(0, wi, wi, wj), Op::none, T(0), Tj.view());
        // stage 2
        gemm<T>(T(1), Bj_c, Op::none, J.block(wi, 0, wj, wi), Op::none, T(1), Ti.view());
        gemm<T>(T(1), Bj_c, Op::none, J.block(wi, wi, wj, wj), Op::none, T(1), Tj.view());
    }
    for (index_t q = 0; q < wi; ++q)
        std::copy_n(Ti.col(q).data(), m, Bi.col(q).data());
    for (index_t q = 0; q < wj; ++q)
        std::copy_n(Tj.col(q).data(), m, Bj.col(q).data());
}

// ---------------------------------------------------------------------------
// Finalize

template <Scalar T>
SvdResult<T> finalize(Matrix<T> workA, Matrix<T> V) {
    using R         = real_t<T>;
    const index_t m = workA.rows(), n = workA.cols();
    if (!V.empty() && (V.rows() != n || V.cols() != n))
        throw ShapeError("finalize: V must be n x n");
    if (m < n)
        throw ShapeError("finalize: working matrix must have rows >= cols");
    const R dtiny = std::numeric_limits<R>::min() / unit_roundoff<T>();

    std::vector<R> norms(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j)
        norms[j] = norm2<T>(workA.col(j));
    std::vector<index_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), index_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t a, index_t b) { return norms[a] > norms[b]; });

    SvdResult<T> out;
    out.sigma.resize(static_cast<std::size_t>(n));
    out.U = Matrix<T>(m, n);
    if (!V.empty())
        out.V = Matrix<T>(n, n);

    index_t formed = n;
    for (index_t k = 0; k < n; ++k) {
        const index_t src = order[k];
        const R s         = norms[src];
        if (!V.empty())
            std::copy_n(V.col(src).data(), n, out.V.col(k).data());
        if (s > dtiny) {
            out.sigma[k] = s;
            auto u       = out.U.col(k);
            auto a       = workA.col(src);
            for (index_t i = 0; i < m; ++i)
                u[i] = a[i] / T(s);
        } else {
            out.sigma[k] = R(0);
            formed       = std::min(formed, k);
        }
    }

    // Orthonormal completion for null columns: start from the unit vector
    // least covered by the existing columns and orthogonalize twice.
    for (index_t k = formed; k < n; ++k) {
        index_t best_row = 0;
        R best_cover     = std::numeric_limits<R>::max();
        for (index_t r = 0; r < m; ++r) {
            R cover(0);
            for (index_t c = 0; c < k; ++c)
                cover += abs2(out.U(r, c));
            if (cover < best_cover) {
                best_cover = cover;
                best_row   = r;
            }
        }
        auto u = out.U.col(k);
        std::fill(u.begin(), u.end(), T(0));
        u[best_row] = T(1);
        for (int pass = 0; pass < 2; ++pass)
            for (index_t c = 0; c < k; ++c) {
                const T proj = conj_dot<T>(out.U.col(c), u);
                auto uc      = out.U.col(c);
                for (index_t i = 0; i < m; ++i)
                    u[i] -= uc[i] * proj;
            }
        const R nrm = norm2<T>(u);
        for (auto &x : u)
            x /= T(nrm);
    }
    out.info.converged = true;
    return out;
}

// ---------------------------------------------------------------------------
// JacobiProblem

template <Scalar T>
JacobiProblem<T>::JacobiProblem(const Matrix<T> &A, const JacobiOptions &opts, Route route)
    : opts_(opts), orig_rows_(A.rows()), orig_cols_(A.cols()) {
    opts_.validate();
    if (!all_finite(A))
        throw DomainError("svd: input contains non-finite entries");

    if (route != Route::automatic && A.rows() < A.cols())
        throw ShapeError("svd: this solver requires rows >= cols");

    info_.transposed = A.rows() < A.cols();
    want_v_          = opts_.compute_right_vectors || info_.transposed;
    work_            = info_.transposed ? adjoint(A) : A;
    const index_t m = work_.rows(), n = work_.cols();

    if (n == 0) {
        info_.path      = SolverPath::empty;
        info_.converged = true;
        return;
    }

    const bool take_qr =
        route == Route::qr ||
        (route == Route::automatic && opts_.use_qr_preprocess &&
         static_cast<double>(m) >= opts_.qr_ratio * static_cast<double>(n));
    const bool small = n <= opts_.small_cutoff;

    if (take_qr) {
        auto qr     = householder_qr<T>(work_.view());
        q_          = std::move(qr.Q);
        work_       = std::move(qr.R);
        info_.path  = small ? SolverPath::qr_unblocked : SolverPath::qr_blocked;
    } else if (route == Route::unblocked || (route == Route::automatic && small)) {
        info_.path = SolverPath::unblocked;
    } else {
        info_.path = SolverPath::blocked;
    }

    if (want_v_)
        v_ = Matrix<T>::identity(n);

    const bool blocked = info_.path == SolverPath::blocked || info_.path == SolverPath::qr_blocked;
    if (blocked) {
        const index_t ell = (n + opts_.nb - 1) / opts_.nb;
        for (index_t b = 0; b < ell; ++b) {
            block_start_.push_back(b * opts_.nb);
            block_width_.push_back(std::min(opts_.nb, n - b * opts_.nb));
        }
        if (ell >= 2)
            schedule_ = round_robin_schedule(ell);
    } else if (n >= 2) {
        schedule_ = round_robin_schedule(n);
    }
}

template <Scalar T>
long JacobiProblem<T>::pairs_per_sweep() const {
    switch (info_.path) {
    case SolverPath::empty: return 0;
    case SolverPath::unblocked:
    case SolverPath::qr_unblocked: return schedule_.pair_count();
    default: return block_start_.size() >= 2 ? schedule_.pair_count() : 1;
    }
}

template <Scalar T>
long JacobiProblem<T>::sweep(WorkCounters &counters, StageTimes *times) {
    if (info_.path == SolverPath::empty) {
        info_.converged = true;
        return 0;
    }
    const bool blocked = info_.path == SolverPath::blocked || info_.path == SolverPath::qr_blocked;
    // A converged problem may still be swept by an unmasked batch; that work
    // applies identity rotations and leaves the recorded telemetry alone.
    const bool bookkeep = !info_.converged;
    if (bookkeep)
        ++info_.outer_sweeps;
    const long rotations =
        blocked ? sweep_blocked(counters, times) : sweep_unblocked(counters, times);
    if (!bookkeep)
        return rotations;
    info_.inner_rotations += rotations;
    if (rotations == 0)
        info_.converged = true;
    return rotations;
}

template <Scalar T>
long JacobiProblem<T>::sweep_unblocked(WorkCounters &counters, StageTimes *times) {
    // The unblocked path runs as one kernel; its time is booked as eig.
    StageTimer timer(times ? &times->eig : nullptr);
    const index_t m = work_.rows();
    long rotations  = 0;
    last_pair_info_.clear();
    for (const auto &iteration : schedule_.iterations)
        for (const auto [i, j] : iteration) {
            auto ai       = work_.col(i);
            auto aj       = work_.col(j);
            const auto dot = opts_.wide_dots ? conj_dot_wide<T> : conj_dot<T>;
            const auto gii = real_part(dot(ai, ai));
            const auto gjj = real_part(dot(aj, aj));
            const T gij    = dot(ai, aj);
            ++counters.gram_calls;
            ++counters.eig_calls;
            const bool rotate = exceeds_threshold<T>(gii, gjj, gij, opts_.k);
            last_pair_info_.push_back({!rotate, 1, rotate ? 1L : 0L});
            if (!rotate)
                continue;
            const auto rot = detail::wide_rotation<T>(gii, gjj, gij);
            detail::rotate_pair<T>(ai.data(), aj.data(), m, rot);
            if (want_v_)
                detail::rotate_pair<T>(v_.col(i).data(), v_.col(j).data(), v_.rows(), rot);
            ++counters.update_calls;
            ++rotations;
        }
    return rotations;
}

template <Scalar T>
long JacobiProblem<T>::sweep_blocked(WorkCounters &counters, StageTimes *times) {
    struct PairOutcome {
        EigInfo info;
        StageTimes t;
    };
    const EigOptions eig_opts{opts_.k,
                              opts_.inner_sweeps > 0 ? opts_.inner_sweeps
                                                     : inner_to_convergence_sweeps};
    const index_t nv = want_v_ ? v_.rows() : 0;

    auto run_pair = [&](index_t bi, index_t bj, PairOutcome &out) {
        StageTimes *t = times ? &out.t : nullptr;
        auto Ai       = work_.block_columns(block_start_[bi], block_width_[bi]);
        auto Aj       = bj >= 0 ? work_.block_columns(block_start_[bj], block_width_[bj])
                                : work_.block_columns(work_.cols(), 0);
        Matrix<T> G;
        {
            StageTimer s(t ? &t->gram : nullptr);
            G = compute_gram<T>(Ai, Aj);
        }
        Matrix<T> before;
        if (pair_observer_)
            before = G;
        Matrix<T> M = Matrix<T>::identity(G.rows());
        {
            StageTimer s(t ? &t->eig : nullptr);
            out.info = jacobi_eig_inplace<T>(G.view(), M.view(), eig_opts);
        }
        {
            StageTimer s(t ? &t->vec : nullptr);
            auto Vi = want_v_ ? v_.block_columns(block_start_[bi], block_width_[bi])
                              : MatrixView<T>{};
            auto Vj = want_v_ && bj >= 0
                          ? v_.block_columns(block_start_[bj], block_width_[bj])
                          : MatrixView<T>{v_.data(), nv, 0, std::max<index_t>(nv, 1)};
            if (opts_.fused_update) {
                fused_pair_update<T>(Ai, Aj, M.view(), opts_.row_block, opts_.parallel);
                if (want_v_)
                    fused_pair_update<T>(Vi, Vj, M.view(), opts_.row_block, opts_.parallel);
            } else {
                two_stage_pair_update<T>(Ai, Aj, M.view());
                if (want_v_)
                    two_stage_pair_update<T>(Vi, Vj, M.view());
            }
        }
        if (pair_observer_) {
#pragma omp critical(bsvd_pair_observer)
            pair_observer_(bi, bj, before.view(), M.view(), out.info);
        }
    };

    long rotations = 0;
    last_pair_info_.clear();
    auto tally = [&](const PairOutcome &o) {
        ++counters.gram_calls;
        ++counters.eig_calls;
        ++counters.update_calls;
        rotations += o.info.rotations_applied;
        last_pair_info_.push_back(o.info);
        if (times)
            *times += o.t;
    };

    if (block_start_.size() == 1) {
        PairOutcome o;
        run_pair(0, -1, o);
        tally(o);
        return rotations;
    }

    std::vector<PairOutcome> outcomes;
    for (const auto &iteration : schedule_.iterations) {
        const auto npairs = static_cast<index_t>(iteration.size());
        outcomes.assign(static_cast<std::size_t>(npairs), PairOutcome{});
        [[maybe_unused]] const bool par = opts_.parallel && npairs > 1;
        // Pairs in one iteration touch disjoint block columns.
#pragma omp parallel for schedule(dynamic) if (par)
        for (index_t p = 0; p < npairs; ++p)
            run_pair(iteration[p].i, iteration[p].j, outcomes[p]);
        for (const auto &o : outcomes)
            tally(o);
    }
    return rotations;
}

template <Scalar T>
SvdResult<T> JacobiProblem<T>::finish(StageTimes *times) && {
    StageTimer timer(times ? &times->aux : nullptr);
    SvdResult<T> r = finalize<T>(std::move(work_), want_v_ ? std::move(v_) : Matrix<T>{});
    if (!q_.empty())
        r.U = multiply<T>(q_.view(), Op::none, r.U.view());
    if (info_.transposed) {
        Matrix<T> u = std::move(r.V);
        r.V         = opts_.compute_right_vectors ? std::move(r.U) : Matrix<T>{};
        r.U         = std::move(u);
    }
    if (info_.path == SolverPath::empty) {
        r.U = Matrix<T>(orig_rows_, 0);
        r.V = opts_.compute_right_vectors ? Matrix<T>(orig_cols_, 0) : Matrix<T>{};
    }
    r.info = info_;
    return r;
}

template <Scalar T>
SvdResult<T> solve(JacobiProblem<T> problem, WorkCounters *counters, StageTimes *times) {
    WorkCounters local;
    while (!problem.done())
        problem.sweep(counters ? *counters : local, times);
    return std::move(problem).finish(times);
}

template <Scalar T>
SvdResult<T> svd_unblocked(const Matrix<T> &A, const JacobiOptions &opts) {
    return solve(JacobiProblem<T>(A, opts, JacobiProblem<T>::Route::unblocked));
}

template <Scalar T>
SvdResult<T> svd_blocked(const Matrix<T> &A, const JacobiOptions &opts) {
    return solve(JacobiProblem<T>(A, opts, JacobiProblem<T>::Route::blocked));
}

template <Scalar T>
SvdResult<T> svd_qr_preprocessed(const Matrix<T> &A, const JacobiOptions &opts) {
    return solve(JacobiProblem<T>(A, opts, JacobiProblem<T>::Route::qr));
}

template <Scalar T>
SvdResult<T> svd_dispatch(const Matrix<T> &A, const JacobiOptions &opts, WorkCounters *counters,
                          StageTimes *times) {
    return solve(JacobiProblem<T>(A, opts), counters, times);
}

#define BSVD_INSTANTIATE(T)                                                                    \
    template Matrix<T> compute_gram<T>(ConstMatrixView<T>, ConstMatrixView<T>);                \
    template void fused_pair_update<T>(MatrixView<T>, MatrixView<T>, ConstMatrixView<T>,       \
                                       index_t, bool);                                         \
    template void two_stage_pair_update<T>(MatrixView<T>, MatrixView<T>, ConstMatrixView<T>);  \
    template SvdResult<T> finalize<T>(Matrix<T>, Matrix<T>);                                   \
    template class JacobiProblem<T>;                                                           \
    template SvdResult<T> solve<T>(JacobiProblem<T>, WorkCounters *, StageTimes *);            \
    template SvdResult<T> svd_unblocked<T>(const Matrix<T> &, const JacobiOptions &);          \
    template SvdResult<T> svd_blocked<T>(const Matrix<T> &, const JacobiOptions &);            \
    template SvdResult<T> svd_qr_preprocessed<T>(const Matrix<T> &, const JacobiOptions &);    \
    template SvdResult<T> svd_dispatch<T>(const Matrix<T> &, const JacobiOptions &,            \
                                          WorkCounters *, StageTimes *);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
