#include <doctest.h>

#include <limits>

#include <bsvd/svd.hpp>
#include <bsvd/verify.hpp>

#include "support.hpp"

using namespace bsvd;
using namespace testing;

namespace {

template <class T>
void check_factorization(const Matrix<T> &A, const SvdResult<T> &r, double k = 30) {
    const double tol = k * unit_roundoff<T>();
    const index_t p  = std::min(A.rows(), A.cols());
    REQUIRE(static_cast<index_t>(r.sigma.size()) == p);
    REQUIRE(r.U.rows() == A.rows());
    REQUIRE(r.U.cols() == p);
    CHECK(is_descending(widen_sigma<T>(r.sigma)));
    for (auto s : r.sigma)
        CHECK(s >= 0);
    const auto [e2, e3] = orthogonality_e2_e3<T>(r);
    CHECK(e2 < tol);
    if (!r.V.empty()) {
        CHECK(residual_e1<T>(A, r) < tol);
        CHECK(e3 < tol);
    }
}

JacobiOptions blocked_options(index_t nb = 4) {
    JacobiOptions o;
    o.nb           = nb;
    o.small_cutoff = 0;
    return o;
}

} // namespace

TEST_CASE("identity") {
    const auto I = Matrix<double>::identity(4);
    for (const auto &opts : {JacobiOptions{}, blocked_options(2)}) {
        const auto r = svd_dispatch<double>(I, opts);
        CHECK(r.sigma == std::vector<double>{1, 1, 1, 1});
        CHECK(r.U == I);
        CHECK(r.V == I);
        CHECK(r.info.converged);
        CHECK(r.info.outer_sweeps == 1);
    }
}

TEST_CASE("[[3, 4], [0, 5]] has singular values sqrt(45), sqrt(5)") {
    // A^T A = [[9, 12], [12, 41]], eigenvalues 45 and 5.
    const Matrix<double> A{{3, 4}, {0, 5}};
    const auto r = svd_unblocked<double>(A);
    CHECK(r.sigma[0] == doctest::Approx(std::sqrt(45.0)).epsilon(1e-15));
    CHECK(r.sigma[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    check_factorization(A, r);
}

TEST_CASE_TEMPLATE("diagonal input is solved without rotations", T, float, double, cfloat,
                   cdouble) {
    Matrix<T> A(5, 4);
    const double d[] = {0.5, -3, 2, 0.25};
    for (index_t i = 0; i < 4; ++i)
        A(i, i) = T(static_cast<real_t<T>>(d[i]));
    const auto r = svd_dispatch<T>(A);
    using R      = real_t<T>;
    CHECK(r.sigma == std::vector<R>{3, 2, 0.5, 0.25});
    CHECK(r.info.inner_rotations == 0);
    CHECK(r.info.outer_sweeps == 1);
    check_factorization(A, r);
}

TEST_CASE_TEMPLATE("all paths agree on random inputs", T, float, double, cfloat, cdouble) {
    const double u = unit_roundoff<T>();
    for (auto [m, n] : {std::pair<index_t, index_t>{9, 9}, {40, 21}, {70, 50}}) {
        CAPTURE(m);
        CAPTURE(n);
        const auto A  = normal_matrix<T>(m, n, static_cast<std::uint64_t>(m + 7 * n));
        const auto ru = svd_unblocked<T>(A);
        const auto rb = svd_blocked<T>(A, blocked_options(8));
        JacobiOptions qr_opts;
        qr_opts.nb     = 8;
        const auto rq = svd_qr_preprocessed<T>(A, qr_opts);
        const auto ref = oracle_svd<T>(A);
        for (const auto *r : {&ru, &rb, &rq}) {
            CHECK(r->info.converged);
            check_factorization(A, *r);
            CHECK(evaluate<T>(A, *r, ref).pass_e4());
            // Relative to sigma_1 the paths differ by their backward errors,
            // which for the blocked paths grow with the number of block updates.
            CHECK(max_abs_diff(r->sigma, ru.sigma) < 100 * u * ru.sigma[0]);
        }
        CHECK(ru.info.path == SolverPath::unblocked);
        CHECK(rb.info.path == SolverPath::blocked);
        CHECK((rq.info.path == SolverPath::qr_unblocked || rq.info.path == SolverPath::qr_blocked));
    }
}

TEST_CASE("ragged last block and a single block") {
    const auto A = normal_matrix<double>(60, 50, 4);
    const auto ref = oracle_svd<double>(A);
    for (index_t nb : {1, 3, 16, 49, 50, 64}) {
        CAPTURE(nb);
        const auto r = svd_blocked<double>(A, blocked_options(nb));
        CHECK(r.info.converged);
        check_factorization(A, r);
        CHECK(evaluate<double>(A, r, ref).pass_e4());
    }
}

TEST_CASE("fused and two-stage updates agree") {
    const auto Bi0 = normal_matrix<cdouble>(150, 5, 1);
    const auto Bj0 = normal_matrix<cdouble>(150, 3, 2);
    const auto J   = normal_matrix<cdouble>(8, 8, 3);
    auto Bi1 = Bi0, Bj1 = Bj0, Bi2 = Bi0, Bj2 = Bj0;
    fused_pair_update<cdouble>(Bi1.view(), Bj1.view(), J.view(), 64, true);
    two_stage_pair_update<cdouble>(Bi2.view(), Bj2.view(), J.view());
    CHECK(max_abs_diff(Bi1, Bi2) < 1e-14);
    CHECK(max_abs_diff(Bj1, Bj2) < 1e-14);

    // Oracle: [Bi Bj] * J with the reference product.
    Matrix<cdouble> B(150, 8);
    for (index_t j = 0; j < 8; ++j)
        for (index_t i = 0; i < 150; ++i)
            B(i, j) = j < 5 ? Bi0(i, j) : Bj0(i, j - 5);
    Matrix<cdouble> BJ(150, 8);
    reference_gemm<cdouble>(1.0, B.view(), Op::none, J.view(), Op::none, 0.0, BJ.view());
    for (index_t j = 0; j < 8; ++j)
        for (index_t i = 0; i < 150; ++i)
            CHECK(std::abs(BJ(i, j) - (j < 5 ? Bi1(i, j) : Bj1(i, j - 5))) < 1e-14);
}

TEST_CASE("serial and OpenMP solves are bitwise identical") {
    const auto A = normal_matrix<cdouble>(90, 70, 11);
    auto opts    = blocked_options(8);
    opts.row_block = 16;
    const auto par = svd_dispatch<cdouble>(A, opts);
    opts.parallel  = false;
    const auto ser = svd_dispatch<cdouble>(A, opts);
    CHECK(par.sigma == ser.sigma);
    CHECK(par.U == ser.U);
    CHECK(par.V == ser.V);
    CHECK(par.info == ser.info);
}

TEST_CASE("gram matrix of a block pair") {
    const auto Ai = normal_matrix<cdouble>(20, 3, 1);
    const auto Aj = normal_matrix<cdouble>(20, 2, 2);
    const auto G  = compute_gram<cdouble>(Ai.view(), Aj.view());
    Matrix<cdouble> B(20, 5);
    for (index_t j = 0; j < 5; ++j)
        for (index_t i = 0; i < 20; ++i)
            B(i, j) = j < 3 ? Ai(i, j) : Aj(i, j - 3);
    Matrix<cdouble> ref(5, 5);
    reference_gemm<cdouble>(1.0, B.view(), Op::conj_trans, B.view(), Op::none, 0.0, ref.view());
    CHECK(max_abs_diff(G, ref) < 1e-13);
    for (index_t j = 0; j < 5; ++j) {
        CHECK(G(j, j).imag() == 0.0);
        for (index_t i = 0; i < 5; ++i)
            CHECK(G(i, j) == std::conj(G(j, i)));
    }
}

TEST_CASE("wide inputs go through the adjoint") {
    const auto A = normal_matrix<cfloat>(6, 20, 9);
    const auto r = svd_dispatch<cfloat>(A);
    CHECK(r.info.transposed);
    CHECK(r.U.rows() == 6);
    CHECK(r.V.rows() == 20);
    CHECK(r.V.cols() == 6);
    check_factorization(A, r);

    JacobiOptions no_v;
    no_v.compute_right_vectors = false;
    const auto tall = svd_dispatch<cfloat>(adjoint(A), no_v);
    CHECK(tall.V.empty());
    check_factorization(adjoint(A), tall);
}

TEST_CASE("rank-deficient and zero inputs") {
    SUBCASE("zero matrix") {
        const Matrix<double> Z(7, 4);
        const auto r = svd_dispatch<double>(Z);
        CHECK(r.sigma == std::vector<double>(4, 0.0));
        CHECK(orthogonality_gap(r.U) < 1e-15);
        CHECK(orthogonality_gap(r.V) < 1e-15);
    }
    SUBCASE("rank two") {
        const auto X = normal_matrix<double>(30, 2, 1);
        const auto Y = normal_matrix<double>(2, 20, 2);
        const auto A = multiply<double>(X.view(), Op::none, Y.view());
        for (const auto &opts : {JacobiOptions{}, blocked_options(4)}) {
            const auto r = svd_dispatch<double>(A, opts);
            check_factorization(A, r);
            for (std::size_t i = 2; i < r.sigma.size(); ++i)
                CHECK(r.sigma[i] < 1e-13 * r.sigma[0]);
        }
    }
    SUBCASE("repeated column") {
        Matrix<double> A(5, 3);
        for (index_t i = 0; i < 5; ++i)
            A(i, 0) = A(i, 2) = static_cast<double>(i + 1);
        A(0, 1) = 1;
        const auto r = svd_dispatch<double>(A);
        CHECK(r.sigma[2] < 1e-15);
        check_factorization(A, r);
    }
}

TEST_CASE("empty shapes") {
    const auto r = svd_dispatch<double>(Matrix<double>(0, 3));
    CHECK(r.sigma.empty());
    CHECK(r.info.path == SolverPath::empty);
    CHECK(r.V.rows() == 3);
    CHECK(r.V.cols() == 0);
    const auto r2 = svd_dispatch<double>(Matrix<double>(4, 0));
    CHECK(r2.sigma.empty());
    CHECK(r2.U.rows() == 4);
}

TEST_CASE("dispatch picks the path") {
    const auto tall = normal_matrix<double>(600, 16, 1);
    JacobiOptions o;
    CHECK(svd_dispatch<double>(tall, o).info.path == SolverPath::unblocked);
    o.use_qr_preprocess = true;
    CHECK(svd_dispatch<double>(tall, o).info.path == SolverPath::qr_unblocked);
    const auto tall48 = normal_matrix<double>(200, 48, 2);
    CHECK(svd_dispatch<double>(tall48, o).info.path == SolverPath::qr_blocked);
    o.use_qr_preprocess = false;
    CHECK(svd_dispatch<double>(tall48, o).info.path == SolverPath::blocked);
}

TEST_CASE("sweep budget exhaustion is reported, not thrown") {
    const auto A = normal_matrix<double>(40, 40, 3);
    JacobiOptions o;
    o.max_nsweeps = 1;
    const auto r  = svd_dispatch<double>(A, o);
    CHECK_FALSE(r.info.converged);
    CHECK(r.info.outer_sweeps == 1);
    CHECK(r.sigma.size() == 40);
}

TEST_CASE("invalid input") {
    Matrix<double> A(3, 3);
    A(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_dispatch<double>(A), DomainError);
    A(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(svd_dispatch<double>(A), DomainError);

    JacobiOptions o;
    o.nb = 0;
    CHECK_THROWS_AS(svd_dispatch<double>(Matrix<double>(2, 2), o), DomainError);
    o    = {};
    o.k  = 0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o             = {};
    o.max_nsweeps = 0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o              = {};
    o.inner_sweeps = -1;
    CHECK_THROWS_AS(o.validate(), DomainError);

    CHECK_THROWS_AS(svd_blocked<double>(Matrix<double>(2, 5)), ShapeError);
}

TEST_CASE("blocked solver reproduces the worked-example Grams") {
    // First sweep, iteration one: pairs (0,1) and (2,3); the observer sees
    // the pre-update Grams. Iteration two then pairs (0,3) and (1,2).
    const auto A = worked_example_matrix();
    JacobiOptions o = blocked_options(2);
    o.inner_sweeps  = 0;
    JacobiProblem<double> p(A, o, JacobiProblem<double>::Route::blocked);
    std::vector<std::pair<index_t, index_t>> order;
    p.set_pair_observer([&](index_t bi, index_t bj, ConstMatrixView<double>,
                            ConstMatrixView<double>, const EigInfo &) {
        order.emplace_back(bi, bj);
    });
    WorkCounters c;
    p.sweep(c);
    REQUIRE(order.size() == 6);
    std::sort(order.begin(), order.begin() + 2);
    std::sort(order.begin() + 2, order.begin() + 4);
    CHECK(order[0] == std::pair<index_t, index_t>{0, 1});
    CHECK(order[1] == std::pair<index_t, index_t>{2, 3});
    CHECK(order[2] == std::pair<index_t, index_t>{0, 3});
    CHECK(order[3] == std::pair<index_t, index_t>{1, 2});
    CHECK(c.gram_calls == 6);
    CHECK(c.eig_calls == 6);
    CHECK(c.update_calls == 6);
}

TEST_CASE_TEMPLATE("sum of squared singular values matches ||A||_F^2", T, float, double, cfloat,
                   cdouble) {
    for (index_t n : {24, 80}) { // unblocked and blocked
        const auto A = normal_matrix<T>(n, n, 500 + static_cast<std::uint64_t>(n));
        const auto r = svd_dispatch<T>(A);
        long double fro2 = 0, s2 = 0;
        for (const auto &x : A.elements())
            fro2 += abs2(static_cast<std::complex<long double>>(x));
        for (auto s : r.sigma)
            s2 += static_cast<long double>(s) * s;
        CHECK(static_cast<double>(std::abs(s2 - fro2) / fro2) <= 8 * unit_roundoff<T>());
    }
}
