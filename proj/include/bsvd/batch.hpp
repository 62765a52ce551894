#pragma once

#include <string>
#include <vector>

#include <bsvd/svd.hpp>

namespace bsvd {

/// Convergence bookkeeping across a batch.
struct BatchState {
    std::vector<char> active;                  ///< 0 once a problem's sweep was quiet
    std::vector<int> sweeps;                   ///< outer sweeps executed per problem
    std::vector<std::vector<EigInfo>> pair_info; ///< last sweep's per-pair eig telemetry
    WorkCounters counters;

    explicit BatchState(std::size_t problems = 0)
        : active(problems, 1), sweeps(problems, 0), pair_info(problems) {}
};

/// Masks off every active problem whose latest sweep applied no rotation in
/// any pair. Returns true when no problem remains active.
bool convergence_scan(BatchState &state);

template <Scalar T>
struct BatchResult {
    std::vector<SvdResult<T>> results;
    std::vector<std::string> errors; ///< empty string when the problem solved
    WorkCounters counters;
    int sweeps_run = 0;              ///< lockstep outer sweeps executed

    bool ok(std::size_t i) const { return errors[i].empty(); }
};

/// Solves every problem with shared options, advancing all of them one outer
/// sweep at a time. Without masking, problems that already converged keep
/// receiving (identity) work until the whole batch is done; with masking they
/// are skipped. Either way each result matches a standalone `svd_dispatch`.
/// Per-problem failures are recorded in `errors` and never abort the batch.
template <Scalar T>
BatchResult<T> batch_svd(const std::vector<Matrix<T>> &problems, const JacobiOptions &opts = {},
                         StageTimes *times = nullptr);

} // namespace bsvd
