// bsvd: generate, solve, verify and benchmark batches of SVD problems.

#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include <bsvd/commands.hpp>

namespace {

using namespace bsvd;

struct SolverFlags {
    std::string design = "design4";
    std::optional<index_t> nb;
    std::optional<double> k;
    std::optional<int> max_sweeps;
    std::optional<int> inner_sweeps;
    bool qr              = false;
    bool no_right        = false;
    bool serial          = false;

    void attach(CLI::App *app, bool with_design = true) {
        if (with_design)
            app->add_option("--design", design, "baseline, design2, design3 or design4")
                ->capture_default_str();
        app->add_option("--nb", nb, "block width");
        app->add_option("--k", k, "threshold multiplier (threshold = k*u)");
        app->add_option("--max-sweeps", max_sweeps, "outer sweep budget");
        app->add_option("--inner-sweeps", inner_sweeps,
                        "inner eigensolver sweeps per pair (0 = to convergence)");
        app->add_flag("--qr", qr, "QR-preprocess tall inputs");
        app->add_flag("--no-right-vectors", no_right, "skip V");
        app->add_flag("--serial", serial, "disable OpenMP inside the solver");
    }

    JacobiOptions options() const {
        JacobiOptions o;
        apply_design(design_from_string(design), o);
        if (nb)
            o.nb = *nb;
        if (k)
            o.k = *k;
        if (max_sweeps)
            o.max_nsweeps = *max_sweeps;
        if (inner_sweeps)
            o.inner_sweeps = *inner_sweeps;
        o.use_qr_preprocess     = qr;
        o.compute_right_vectors = !no_right;
        o.parallel              = !serial;
        return o;
    }
};

const std::map<std::string, Family> family_names = {
    {"random", Family::random},     {"arith", Family::arith},     {"cluster0", Family::cluster0},
    {"cluster1", Family::cluster1}, {"logrand", Family::logrand}, {"geo", Family::geo}};

std::vector<std::string> split(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Batched one-sided block Jacobi SVD"};
    app.require_subcommand(1);

    std::string dtype = "d";
    std::string family_name;
    std::optional<double> kappa;
    std::uint64_t seed = 1;

    GenConfig gen;
    std::string gen_out;
    auto *g = app.add_subcommand("gen", "write a batch of test matrices");
    g->add_option("--family", family_name, "random, arith, cluster0, cluster1, logrand, geo")
        ->required()
        ->check(CLI::IsMember(family_names));
    g->add_option("--n", gen.n, "columns")->required();
    g->add_option("--m", gen.m, "rows (default n)");
    g->add_option("--kappa", kappa, "condition number (default 1e5 single, 1e10 double)");
    g->add_option("--batch", gen.batch, "number of matrices")->capture_default_str();
    g->add_option("--seed", seed, "seed")->capture_default_str();
    g->add_option("--dtype", dtype, "s, d, c or z")
        ->capture_default_str()
        ->check(CLI::IsMember({"s", "d", "c", "z"}));
    g->add_option("--out", gen_out, "output file")->required();

    SolveConfig solve;
    SolverFlags solve_flags;
    std::string solve_in, solve_out;
    auto *s = app.add_subcommand("solve", "solve every matrix in a file");
    s->add_option("--in", solve_in, "input file")->required();
    s->add_option("--out", solve_out, "results file (U, sigma, V per problem)");
    solve_flags.attach(s);

    VerifyConfig verify;
    SolverFlags verify_flags;
    std::string verify_in, verify_results;
    auto *v = app.add_subcommand("verify", "check accuracy against the thresholds (CSV)");
    v->add_option("--in", verify_in, "input file")->required();
    v->add_option("--results", verify_results, "results from solve (default: solve here)");
    v->add_option("--family", family_name, "family the input was generated from")
        ->check(CLI::IsMember(family_names));
    v->add_option("--kappa", kappa, "kappa used at generation");
    v->add_option("--seed", seed, "seed used at generation")->capture_default_str();
    verify_flags.attach(v);

    BenchConfig bench;
    SolverFlags bench_flags;
    std::string sizes = "64", designs = "baseline,design2,design3,design4";
    auto *b = app.add_subcommand("bench", "time the design variants (CSV)");
    b->add_option("--n", sizes, "comma-separated sizes")->capture_default_str();
    b->add_option("--m", bench.m, "rows (default n)");
    b->add_option("--designs", designs, "comma-separated designs")->capture_default_str();
    b->add_option("--family", family_name, "matrix family")->check(CLI::IsMember(family_names));
    b->add_option("--kappa", kappa, "condition number");
    b->add_option("--batch", bench.batch, "matrices per batch")->capture_default_str();
    b->add_option("--seed", seed, "seed")->capture_default_str();
    b->add_option("--dtype", dtype, "s, d, c or z")
        ->capture_default_str()
        ->check(CLI::IsMember({"s", "d", "c", "z"}));
    b->add_option("--repeats", bench.repeats, "timed runs per design")->capture_default_str();
    bench_flags.attach(b, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) {
            gen.family = family_names.at(family_name);
            gen.kappa  = kappa;
            gen.seed   = seed;
            gen.dtype  = dtype_from_letter(dtype.at(0));
            gen.out    = gen_out;
            return cmd_gen(gen, std::cout, std::cerr);
        }
        if (s->parsed()) {
            solve.in   = solve_in;
            solve.out  = solve_out;
            solve.opts = solve_flags.options();
            return cmd_solve(solve, std::cout, std::cerr);
        }
        if (v->parsed()) {
            verify.in      = verify_in;
            verify.results = verify_results;
            verify.opts    = verify_flags.options();
            if (!family_name.empty())
                verify.family = family_names.at(family_name);
            verify.kappa = kappa;
            verify.seed  = seed;
            return cmd_verify(verify, std::cout, std::cerr);
        }
        bench.sizes.clear();
        for (const auto &n : split(sizes))
            bench.sizes.push_back(std::stol(n));
        bench.designs.clear();
        for (const auto &d : split(designs))
            bench.designs.push_back(design_from_string(d));
        if (!family_name.empty())
            bench.family = family_names.at(family_name);
        bench.kappa = kappa;
        bench.seed  = seed;
        bench.dtype = dtype_from_letter(dtype.at(0));
        bench.opts  = bench_flags.options();
        return cmd_bench(bench, std::cout, std::cerr);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
