#include <doctest.h>

#include <sstream>

#include <bsvd/commands.hpp>

#include "support.hpp"

using namespace bsvd;
using namespace testing;

namespace {

std::vector<std::string> lines(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string &line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');)
        out.push_back(f);
    return out;
}

} // namespace

TEST_CASE("designs map to solver options") {
    JacobiOptions o;
    apply_design(Design::baseline, o);
    CHECK(o.inner_sweeps == 0);
    CHECK_FALSE(o.fused_update);
    CHECK_FALSE(o.masking);
    apply_design(Design::design2, o);
    CHECK(o.inner_sweeps == 1);
    CHECK_FALSE(o.fused_update);
    apply_design(Design::design3, o);
    CHECK(o.fused_update);
    CHECK_FALSE(o.masking);
    apply_design(Design::design4, o);
    CHECK(o.inner_sweeps == 1);
    CHECK(o.fused_update);
    CHECK(o.masking);
    for (Design d : all_designs)
        CHECK(design_from_string(to_string(d)) == d);
    CHECK_THROWS_AS(design_from_string("design5"), DomainError);
}

TEST_CASE("gen") {
    TempDir dir;
    std::ostringstream out, err;
    GenConfig g;
    g.family = Family::geo;
    g.n      = 16;
    g.kappa  = 1e10;
    g.batch  = 100;
    g.dtype  = Dtype::real_double;
    g.seed   = 7;
    g.out    = dir.file("geo.bsvd");
    REQUIRE(cmd_gen(g, out, err) == 0);
    const auto bytes = read_bytes(g.out);
    REQUIRE(bytes.size() == 12 + 100 * (8 + 16 * 16 * 8));
    CHECK(bytes[5] == 1);
    CHECK(bytes[8] == 100);

    SUBCASE("deterministic") {
        GenConfig r;
        r.n   = 8;
        r.out = dir.file("r1.bsvd");
        REQUIRE(cmd_gen(r, out, err) == 0);
        r.out = dir.file("r2.bsvd");
        REQUIRE(cmd_gen(r, out, err) == 0);
        CHECK(read_bytes(dir.file("r1.bsvd")) == read_bytes(dir.file("r2.bsvd")));
    }
    SUBCASE("invalid parameters") {
        GenConfig bad;
        bad.family = Family::arith;
        bad.n      = 1;
        bad.out    = dir.file("bad.bsvd");
        CHECK(cmd_gen(bad, out, err) != 0);
        CHECK(err.str().find("arith") != std::string::npos);
        bad.family = Family::random;
        bad.n      = 4;
        bad.m      = 2;
        CHECK(cmd_gen(bad, out, err) != 0);
        bad.m   = 0;
        bad.out = dir.file("no/such/dir/x.bsvd");
        CHECK(cmd_gen(bad, out, err) != 0);
    }
}

TEST_CASE("solve") {
    TempDir dir;
    std::ostringstream out, err;

    SUBCASE("identity batch converges in one sweep") {
        std::vector<Matrix<double>> batch(3, Matrix<double>::identity(5));
        write_bsvd(dir.file("id.bsvd"), AnyBatch(batch));
        SolveConfig s;
        s.in  = dir.file("id.bsvd");
        s.out = dir.file("id.out");
        REQUIRE(cmd_solve(s, out, err) == 0);
        CHECK(out.str().find("converged=3") != std::string::npos);
        CHECK(out.str().find("sweeps_max=1 ") != std::string::npos);
        const auto res = unpack_results<double>(
            std::get<std::vector<Matrix<double>>>(read_bsvd(s.out)));
        REQUIRE(res.size() == 3);
        CHECK(res[2].sigma == std::vector<double>(5, 1.0));
        CHECK(res[2].U == Matrix<double>::identity(5));
    }
    SUBCASE("worked example with nb = 2 verifies at double thresholds") {
        write_bsvd(dir.file("ex.bsvd"),
                   AnyBatch(std::vector<Matrix<double>>{worked_example_matrix()}));
        SolveConfig s;
        s.in           = dir.file("ex.bsvd");
        s.out          = dir.file("ex.out");
        s.opts.nb      = 2;
        s.opts.small_cutoff = 0;
        REQUIRE(cmd_solve(s, out, err) == 0);
        VerifyConfig v;
        v.in      = s.in;
        v.results = s.out;
        std::ostringstream csv;
        CHECK(cmd_verify(v, csv, err) == 0);
        const auto rows = lines(csv.str());
        REQUIRE(rows.size() == 2);
        CHECK(fields(rows[1])[9] == "3.3307e-15");
    }
    SUBCASE("truncated input") {
        std::vector<Matrix<double>> batch{normal_matrix<double>(4, 4, 1)};
        auto bytes = serialize(AnyBatch(batch));
        bytes.resize(bytes.size() - 3);
        write_bytes(dir.file("t.bsvd"), bytes);
        SolveConfig s;
        s.in = dir.file("t.bsvd");
        CHECK(cmd_solve(s, out, err) != 0);
        CHECK(err.str().find("truncated") != std::string::npos);
    }
    SUBCASE("non-convergence is flagged but not fatal") {
        std::vector<Matrix<double>> batch{normal_matrix<double>(30, 30, 1)};
        write_bsvd(dir.file("n.bsvd"), AnyBatch(batch));
        SolveConfig s;
        s.in               = dir.file("n.bsvd");
        s.opts.max_nsweeps = 1;
        CHECK(cmd_solve(s, out, err) == 0);
        CHECK(out.str().find("converged=0") != std::string::npos);
        CHECK(err.str().find("not converged") != std::string::npos);
    }
}

TEST_CASE("verify") {
    TempDir dir;
    std::ostringstream out, err;

    SUBCASE("geo double n=32 batch 20 passes with the V exception") {
        GenConfig g;
        g.family = Family::geo;
        g.n      = 32;
        g.batch  = 20;
        g.seed   = 5;
        g.out    = dir.file("geo.bsvd");
        REQUIRE(cmd_gen(g, out, err) == 0);
        VerifyConfig v;
        v.in     = g.out;
        v.family = Family::geo;
        v.seed   = 5;
        std::ostringstream csv;
        CHECK(cmd_verify(v, csv, err) == 0);
        const auto rows = lines(csv.str());
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] == verify_csv_header);
        const auto f = fields(rows[1]);
        REQUIRE(f.size() == fields(verify_csv_header).size());
        CHECK(f[0] == "geo");
        CHECK(f[1] == "d");
        CHECK(f[4] == "20");
        CHECK(f[10] == "1.1102e-14");
    }
    SUBCASE("single precision prints the single threshold; random uses the oracle") {
        GenConfig g;
        g.n     = 10;
        g.batch = 3;
        g.dtype = Dtype::complex_single;
        g.out   = dir.file("c.bsvd");
        REQUIRE(cmd_gen(g, out, err) == 0);
        VerifyConfig v;
        v.in = g.out;
        std::ostringstream csv;
        CHECK(cmd_verify(v, csv, err) == 0);
        CHECK(fields(lines(csv.str())[1])[9] == "1.7881e-06");
        CHECK(err.str().find("oracle") != std::string::npos);
    }
    SUBCASE("one row per shape") {
        std::vector<Matrix<double>> batch{normal_matrix<double>(6, 4, 1),
                                          normal_matrix<double>(3, 3, 2),
                                          normal_matrix<double>(6, 4, 3)};
        write_bsvd(dir.file("mix.bsvd"), AnyBatch(batch));
        VerifyConfig v;
        v.in = dir.file("mix.bsvd");
        std::ostringstream csv;
        CHECK(cmd_verify(v, csv, err) == 0);
        const auto rows = lines(csv.str());
        REQUIRE(rows.size() == 3);
        CHECK(fields(rows[1])[4] == "2");
        CHECK(fields(rows[2])[2] == "3");
    }
    SUBCASE("corrupted results fail with exit code 1") {
        std::vector<Matrix<double>> batch{normal_matrix<double>(8, 8, 1)};
        write_bsvd(dir.file("a.bsvd"), AnyBatch(batch));
        SolveConfig s;
        s.in  = dir.file("a.bsvd");
        s.out = dir.file("a.out");
        REQUIRE(cmd_solve(s, out, err) == 0);
        auto packed = std::get<std::vector<Matrix<double>>>(read_bsvd(s.out));
        packed[0](3, 3) += 1e-9;
        write_bsvd(dir.file("bad.out"), AnyBatch(packed));
        VerifyConfig v;
        v.in      = s.in;
        v.results = dir.file("bad.out");
        std::ostringstream csv;
        CHECK(cmd_verify(v, csv, err) == 1);
        const auto f = fields(lines(csv.str())[1]);
        CHECK(f[11] == "0"); // e1
        CHECK(f[12] == "0"); // e2
    }
    SUBCASE("empty batch and mismatched results") {
        write_bsvd(dir.file("e.bsvd"), AnyBatch(std::vector<Matrix<double>>{}));
        VerifyConfig v;
        v.in = dir.file("e.bsvd");
        CHECK(cmd_verify(v, out, err) == 2);
        CHECK(err.str().find("empty") != std::string::npos);

        write_bsvd(dir.file("f.bsvd"),
                   AnyBatch(std::vector<Matrix<float>>{normal_matrix<float>(3, 3, 1)}));
        write_bsvd(dir.file("g.out"),
                   AnyBatch(std::vector<Matrix<double>>{Matrix<double>(3, 3),
                                                        Matrix<double>(3, 1),
                                                        Matrix<double>(3, 3)}));
        v.in      = dir.file("f.bsvd");
        v.results = dir.file("g.out");
        CHECK(cmd_verify(v, out, err) == 2);
    }
}

TEST_CASE("bench emits one row per size and design") {
    BenchConfig b;
    b.sizes   = {12, 20};
    b.batch   = 2;
    b.repeats = 2;
    b.opts.nb = 4;
    std::ostringstream csv, err;
    REQUIRE(cmd_bench(b, csv, err) == 0);
    const auto rows = lines(csv.str());
    REQUIRE(rows.size() == 1 + 2 * 4);
    CHECK(rows[0] == bench_csv_header);
    const auto ncol = fields(bench_csv_header).size();
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(fields(rows[i]).size() == ncol);
    CHECK(fields(rows[1])[0] == "baseline");
    CHECK(fields(rows[4])[0] == "design4");
    CHECK(fields(rows[5])[2] == "20");

    b.repeats = 0;
    CHECK(cmd_bench(b, csv, err) == 2);
}
