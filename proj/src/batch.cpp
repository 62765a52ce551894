#include <bsvd/batch.hpp>

#include <algorithm>
#include <optional>

namespace bsvd {

bool convergence_scan(BatchState &state) {
    bool all_done = true;
    for (std::size_t i = 0; i < state.active.size(); ++i) {
        if (!state.active[i])
            continue;
        const auto &info = state.pair_info[i];
        const bool quiet = std::all_of(info.begin(), info.end(),
                                       [](const EigInfo &e) { return e.rotations_applied == 0; });
        if (quiet)
            state.active[i] = 0;
        else
            all_done = false;
    }
    return all_done;
}

template <Scalar T>
BatchResult<T> batch_svd(const std::vector<Matrix<T>> &problems, const JacobiOptions &opts,
                         StageTimes *times) {
    if (problems.empty())
        throw DomainError("batch_svd: empty batch");
    opts.validate();
    const auto count = static_cast<index_t>(problems.size());

    // Parallelism goes over problems; each problem runs its own loops serially.
    JacobiOptions inner = opts;
    if (count > 1)
        inner.parallel = false;
    [[maybe_unused]] const bool par = opts.parallel && count > 1;

    BatchResult<T> out;
    out.results.resize(problems.size());
    out.errors.resize(problems.size());

    std::vector<std::optional<JacobiProblem<T>>> solvers(problems.size());
    for (index_t i = 0; i < count; ++i) {
        try {
            solvers[i].emplace(problems[i], inner);
        } catch (const std::exception &e) {
            out.errors[i] = e.what();
        }
    }

    BatchState state(problems.size());
    for (index_t i = 0; i < count; ++i)
        if (!solvers[i])
            state.active[i] = 0;

    std::vector<WorkCounters> local_counts(problems.size());
    std::vector<StageTimes> local_times(problems.size());
    StageTimes *const no_times = nullptr;

    bool all_done = std::none_of(state.active.begin(), state.active.end(),
                                 [](char a) { return a != 0; });
    while (!all_done && out.sweeps_run < opts.max_nsweeps) {
        ++out.sweeps_run;
#pragma omp parallel for schedule(dynamic) if (par)
        for (index_t i = 0; i < count; ++i) {
            auto &solver = solvers[i];
            if (!solver)
                continue;
            if (!state.active[i] && opts.masking) {
                const long skipped = solver->pairs_per_sweep();
                local_counts[i].masked_pair_skips += skipped;
                solver->record_masked_skip(skipped);
                continue;
            }
            try {
                solver->sweep(local_counts[i], times ? &local_times[i] : no_times);
                state.pair_info[i] = solver->last_pair_info();
                state.sweeps[i]    = solver->sweeps();
            } catch (const std::exception &e) {
#pragma omp critical(bsvd_batch_error)
                {
                    out.errors[i] = e.what();
                    solver.reset();
                    state.pair_info[i].clear();
                }
            }
        }
        for (index_t i = 0; i < count; ++i)
            if (!solvers[i])
                state.active[i] = 0;
        all_done = convergence_scan(state);
    }

#pragma omp parallel for schedule(dynamic) if (par)
    for (index_t i = 0; i < count; ++i) {
        if (!solvers[i])
            continue;
        out.results[i] = std::move(*solvers[i]).finish(times ? &local_times[i] : no_times);
    }

    for (index_t i = 0; i < count; ++i) {
        state.counters += local_counts[i];
        if (times)
            *times += local_times[i];
    }
    out.counters = state.counters;
    return out;
}

template BatchResult<float> batch_svd<float>(const std::vector<Matrix<float>> &,
                                             const JacobiOptions &, StageTimes *);
template BatchResult<double> batch_svd<double>(const std::vector<Matrix<double>> &,
                                               const JacobiOptions &, StageTimes *);
template BatchResult<std::complex<float>>
batch_svd<std::complex<float>>(const std::vector<Matrix<std::complex<float>>> &,
                               const JacobiOptions &, StageTimes *);
template BatchResult<std::complex<double>>
batch_svd<std::complex<double>>(const std::vector<Matrix<std::complex<double>>> &,
                                const JacobiOptions &, StageTimes *);

} // namespace bsvd
