#include <bsvd/commands.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include <bsvd/batch.hpp>
#include <bsvd/verify.hpp>

namespace bsvd {

const char *to_string(Design d) {
    switch (d) {
    case Design::baseline: return "baseline";
    case Design::design2: return "design2";
    case Design::design3: return "design3";
    case Design::design4: return "design4";
    }
    return "?";
}

Design design_from_string(const std::string &name) {
    for (Design d : all_designs)
        if (name == to_string(d))
            return d;
    throw DomainError("unknown design '" + name + "'");
}

void apply_design(Design d, JacobiOptions &opts) {
    opts.inner_sweeps = d == Design::baseline ? 0 : 1;
    opts.fused_update = d == Design::design3 || d == Design::design4;
    opts.masking      = d == Design::design4;
}

double default_kappa(Dtype dt) {
    return dtype_is_double(dt) ? 1e10 : 1e5;
}

namespace {

template <class T>
struct Tag {
    using type = T;
};

template <class F>
decltype(auto) with_dtype(Dtype dt, F &&f) {
    switch (dt) {
    case Dtype::real_single: return f(Tag<float>{});
    case Dtype::real_double: return f(Tag<double>{});
    case Dtype::complex_single: return f(Tag<std::complex<float>>{});
    case Dtype::complex_double: return f(Tag<std::complex<double>>{});
    }
    throw DomainError("unknown dtype");
}

template <class T>
const std::vector<Matrix<T>> &as(const AnyBatch &b) {
    return std::get<std::vector<Matrix<T>>>(b);
}

double median(std::vector<double> v) {
    if (v.empty())
        return 0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

} // namespace

template <Scalar T>
std::vector<Matrix<T>> pack_results(const std::vector<SvdResult<T>> &results) {
    std::vector<Matrix<T>> out;
    out.reserve(3 * results.size());
    for (const auto &r : results) {
        out.push_back(r.U);
        Matrix<T> s(static_cast<index_t>(r.sigma.size()), 1);
        for (std::size_t i = 0; i < r.sigma.size(); ++i)
            s(static_cast<index_t>(i), 0) = T(r.sigma[i]);
        out.push_back(std::move(s));
        out.push_back(r.V);
    }
    return out;
}

template <Scalar T>
std::vector<SvdResult<T>> unpack_results(const std::vector<Matrix<T>> &packed) {
    if (packed.size() % 3 != 0)
        throw FormatError("results: entry count is not a multiple of 3");
    std::vector<SvdResult<T>> out(packed.size() / 3);
    for (std::size_t p = 0; p < out.size(); ++p) {
        const Matrix<T> &s = packed[3 * p + 1];
        if (s.cols() != 1 && !s.empty())
            throw FormatError("results: sigma entry must be a column");
        out[p].U = packed[3 * p];
        out[p].V = packed[3 * p + 2];
        for (index_t i = 0; i < s.rows(); ++i)
            out[p].sigma.push_back(real_part(s(i, 0)));
    }
    return out;
}

int cmd_gen(const GenConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        const index_t m = cfg.m == 0 ? cfg.n : cfg.m;
        if (cfg.n < 1 || m < cfg.n)
            throw ShapeError("gen: requires m >= n >= 1");
        if (cfg.batch < 1)
            throw DomainError("gen: batch must be >= 1");
        SpectrumSpec spec{cfg.family, cfg.kappa.value_or(default_kappa(cfg.dtype)), cfg.n,
                          cfg.seed};
        if (cfg.family != Family::random)
            make_sigma(spec); // reject bad parameters before generating anything
        AnyBatch batch = with_dtype(cfg.dtype, [&](auto tag) -> AnyBatch {
            using T = typename decltype(tag)::type;
            return gen_batch<T>(m, spec, cfg.batch);
        });
        write_bsvd(cfg.out, batch);
        out << "wrote " << cfg.batch << " " << to_string(cfg.family) << " matrices (" << m << "x"
            << cfg.n << ", " << dtype_letter(cfg.dtype) << ") to " << cfg.out.string() << "\n";
        return 0;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_solve(const SolveConfig &cfg, std::ostream &out, std::ostream &err) {
    AnyBatch input;
    try {
        cfg.opts.validate();
        input = read_bsvd(cfg.in);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (batch_size(input) == 0) {
        err << "error: input batch is empty\n";
        return 2;
    }

    return std::visit(
        [&](const auto &mats) -> int {
            using T      = typename std::decay_t<decltype(mats)>::value_type::value_type;
            auto br      = batch_svd<T>(mats, cfg.opts);
            int failures = 0, converged = 0;
            int smin = cfg.opts.max_nsweeps, smax = 0;
            for (std::size_t i = 0; i < mats.size(); ++i) {
                if (!br.ok(i)) {
                    ++failures;
                    err << "problem " << i << ": " << br.errors[i] << "\n";
                    continue;
                }
                const SvdInfo &info = br.results[i].info;
                converged += info.converged;
                smin = std::min(smin, info.outer_sweeps);
                smax = std::max(smax, info.outer_sweeps);
                if (!info.converged)
                    err << "problem " << i << ": not converged after " << info.outer_sweeps
                        << " sweeps\n";
            }
            if (failures == static_cast<int>(mats.size()))
                smin = 0;
            out << "problems=" << mats.size() << " converged=" << converged
                << " failed=" << failures << " sweeps_min=" << smin << " sweeps_max=" << smax
                << " lockstep_sweeps=" << br.sweeps_run
                << " masked_pair_skips=" << br.counters.masked_pair_skips
                << " eig_calls=" << br.counters.eig_calls << "\n";
            if (!cfg.out.empty()) {
                try {
                    write_bsvd(cfg.out, AnyBatch(pack_results<T>(br.results)));
                } catch (const std::exception &e) {
                    err << "error: " << e.what() << "\n";
                    return 2;
                }
            }
            return failures ? 1 : 0;
        },
        input);
}

namespace {

struct ShapeRow {
    index_t m = 0, n = 0;
    int count = 0;
    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    bool pass_e1 = true, pass_e2 = true, pass_e3 = true, pass_e4 = true, sorted = true;
    bool converged = true;
};

template <Scalar T>
int verify_typed(const VerifyConfig &cfg, const std::vector<Matrix<T>> &mats,
                 std::ostream &out, std::ostream &err) {
    std::vector<SvdResult<T>> results;
    std::vector<std::string> errors(mats.size());
    if (cfg.results.empty()) {
        auto br = batch_svd<T>(mats, cfg.opts);
        results = std::move(br.results);
        errors  = std::move(br.errors);
    } else {
        const AnyBatch packed = read_bsvd(cfg.results);
        if (dtype_of(packed) != dtype_of<T>())
            throw FormatError("results dtype does not match the input");
        results = unpack_results<T>(as<T>(packed));
        if (results.size() != mats.size())
            throw FormatError("results count does not match the input");
    }

    const bool prescribed = cfg.family && *cfg.family != Family::random;
    if (!prescribed)
        err << "warning: no prescribed singular values; e4 uses the double-precision oracle\n";
    const Dtype dt       = dtype_of<T>();
    const double kappa   = cfg.kappa.value_or(default_kappa(dt));
    const bool relax_e3  = prescribed && dtype_is_double(dt) &&
                          (*cfg.family == Family::logrand || *cfg.family == Family::geo);
    const double e3_fact = relax_e3 ? 100.0 / 30.0 : 1.0;

    std::vector<ShapeRow> rows;
    std::map<std::pair<index_t, index_t>, std::size_t> row_of;
    double threshold = 0, e3_threshold = 0;
    for (std::size_t b = 0; b < mats.size(); ++b) {
        const Matrix<T> &A = mats[b];
        auto [it, fresh]   = row_of.try_emplace({A.rows(), A.cols()}, rows.size());
        if (fresh)
            rows.push_back(ShapeRow{A.rows(), A.cols()});
        ShapeRow &row = rows[it->second];
        ++row.count;
        auto fail_all = [&] {
            row.e1 = row.e2 = row.e3 = row.e4 = std::numeric_limits<double>::infinity();
            row.pass_e1 = row.pass_e2 = row.pass_e3 = row.pass_e4 = row.sorted = false;
            row.converged = false;
        };
        if (!errors[b].empty()) {
            err << "problem " << b << ": " << errors[b] << "\n";
            fail_all();
            continue;
        }
        try {
            std::vector<double> ref;
            if (prescribed) {
                SpectrumSpec spec{*cfg.family, kappa, std::min(A.rows(), A.cols()),
                                  mix_seed(cfg.seed + b)};
                ref = make_sigma(spec);
            } else {
                ref = oracle_svd<T>(A);
            }
            const ErrorReport rep = evaluate<T>(A, results[b], ref, 30.0, e3_fact);
            threshold    = rep.threshold;
            e3_threshold = rep.e3_threshold;
            row.e1       = std::max(row.e1, rep.e1);
            row.e2       = std::max(row.e2, rep.e2);
            row.e3       = std::max(row.e3, rep.e3);
            row.e4       = std::max(row.e4, rep.e4);
            row.pass_e1 &= rep.pass_e1();
            row.pass_e2 &= rep.pass_e2();
            row.pass_e3 &= rep.pass_e3();
            row.pass_e4 &= rep.pass_e4();
            row.sorted &= rep.sorted;
            if (cfg.results.empty())
                row.converged &= results[b].info.converged;
        } catch (const std::exception &e) {
            err << "problem " << b << ": " << e.what() << "\n";
            fail_all();
        }
    }
    if (threshold == 0) {
        threshold    = dtype_threshold(dt);
        e3_threshold = threshold * e3_fact;
    }

    const std::string family = cfg.family ? to_string(*cfg.family) : "unknown";
    const auto flags         = out.flags();
    const auto prec          = out.precision();
    out << verify_csv_header << "\n";
    bool all_pass = true;
    for (const auto &r : rows) {
        const bool pass = r.pass_e1 && r.pass_e2 && r.pass_e3 && r.pass_e4 && r.sorted;
        all_pass &= pass;
        out << family << "," << dtype_letter(dt) << "," << r.m << "," << r.n << "," << r.count
            << "," << std::scientific << std::setprecision(4) << r.e1 << "," << r.e2 << ","
            << r.e3 << "," << r.e4 << "," << threshold << "," << e3_threshold << ","
            << r.pass_e1 << "," << r.pass_e2 << "," << r.pass_e3 << "," << r.pass_e4 << ","
            << r.sorted << "," << r.converged << "\n";
        out.flags(flags);
        out.precision(prec);
    }
    return all_pass ? 0 : 1;
}

} // namespace

int cmd_verify(const VerifyConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        cfg.opts.validate();
        const AnyBatch input = read_bsvd(cfg.in);
        if (batch_size(input) == 0) {
            err << "error: input batch is empty\n";
            return 2;
        }
        return std::visit(
            [&](const auto &mats) {
                using T = typename std::decay_t<decltype(mats)>::value_type::value_type;
                return verify_typed<T>(cfg, mats, out, err);
            },
            input);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_bench(const BenchConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        cfg.opts.validate();
        if (cfg.repeats < 1 || cfg.batch < 1 || cfg.designs.empty() || cfg.sizes.empty())
            throw DomainError("bench: repeats, batch, designs and sizes must be non-empty");
        out << bench_csv_header << "\n";
        for (const index_t n : cfg.sizes) {
            const index_t m = cfg.m == 0 ? n : cfg.m;
            SpectrumSpec spec{cfg.family, cfg.kappa.value_or(default_kappa(cfg.dtype)), n,
                              cfg.seed};
            with_dtype(cfg.dtype, [&](auto tag) {
                using T                    = typename decltype(tag)::type;
                const std::vector<Matrix<T>> mats = gen_batch<T>(m, spec, cfg.batch);
                for (const Design d : cfg.designs) {
                    JacobiOptions opts = cfg.opts;
                    apply_design(d, opts);
                    // The designs differ only inside the blocked solver.
                    opts.small_cutoff = 0;
                    std::vector<double> wall, aux, gram, eig, vec;
                    BatchResult<T> last;
                    for (int rep = 0; rep < cfg.repeats; ++rep) {
                        StageTimes st;
                        const auto t0 = std::chrono::steady_clock::now();
                        last          = batch_svd<T>(mats, opts, &st);
                        const auto t1 = std::chrono::steady_clock::now();
                        wall.push_back(std::chrono::duration<double>(t1 - t0).count());
                        aux.push_back(st.aux);
                        gram.push_back(st.gram);
                        eig.push_back(st.eig);
                        vec.push_back(st.vec);
                    }
                    for (std::size_t i = 0; i < mats.size(); ++i)
                        if (!last.ok(i))
                            err << "problem " << i << ": " << last.errors[i] << "\n";
                    const double a = median(aux), g = median(gram), e = median(eig),
                                 v          = median(vec);
                    const double stage_sum = a + g + e + v;
                    out << to_string(d) << "," << m << "," << n << "," << cfg.batch << ","
                        << dtype_letter(cfg.dtype) << "," << cfg.repeats << "," << median(wall)
                        << "," << a << "," << g << "," << e << "," << v << ","
                        << (stage_sum > 0 ? e / stage_sum : 0.0) << ","
                        << last.counters.gram_calls << "," << last.counters.eig_calls << ","
                        << last.counters.update_calls << ","
                        << last.counters.masked_pair_skips << "," << last.sweeps_run << "\n";
                }
            });
        }
        return 0;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

#define BSVD_INSTANTIATE(T)                                                                 \
    template std::vector<Matrix<T>> pack_results<T>(const std::vector<SvdResult<T>> &);     \
    template std::vector<SvdResult<T>> unpack_results<T>(const std::vector<Matrix<T>> &);

BSVD_INSTANTIATE(float)
BSVD_INSTANTIATE(double)
BSVD_INSTANTIATE(std::complex<float>)
BSVD_INSTANTIATE(std::complex<double>)

#undef BSVD_INSTANTIATE

} // namespace bsvd
