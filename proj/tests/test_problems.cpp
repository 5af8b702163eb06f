#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reference.hpp"

#include "lfso/linalg.hpp"
#include "lfso/problems.hpp"
#include "lfso/solver.hpp"

#include <random>
#include <sstream>

using namespace lfso;
using doctest::Approx;

TEST_CASE("ipow")
{
    CHECK(ipow(2.0, 0) == 1.0);
    CHECK(ipow(2.0, 10) == 1024.0);
    CHECK(ipow(-3.0, 3) == -27.0);
    CHECK(ipow(0.5, 7) == 0.0078125);
    const VectorXd v = (VectorXd(3) << -2.0, 0.5, 3.0).finished();
    const VectorXd c = cwise_ipow(v, 3);
    CHECK(c[0] == -8.0);
    CHECK(c[1] == 0.125);
    CHECK(c[2] == 27.0);
}

TEST_CASE("spectral norm")
{
    CHECK(spectral_norm(MatrixXd(MatrixXd::Identity(4, 4))).value == Approx(1.0).epsilon(1e-14));
    const MatrixXd d = (MatrixXd(2, 2) << 3.0, 0.0, 0.0, 1.0).finished();
    const auto r = spectral_norm(d);
    CHECK(r.value == Approx(3.0).epsilon(1e-14));
    CHECK(r.converged);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXd a(5, 8);
        for (Index i = 0; i < a.size(); ++i)
            a.data()[i] = n01(rng);
        const double want = ref::svd_spectral_norm(a);
        CHECK(spectral_norm(a).value == Approx(want).epsilon(1e-10));
        CHECK(condition_number(a) == Approx(ref::svd_condition_number(a)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(spectral_norm(MatrixXd(MatrixXd::Zero(2, 2))), Error);
}

TEST_CASE("power iteration reports non-convergence")
{
    const MatrixXd a = (MatrixXd(2, 2) << 1.0, 0.0, 0.0, 0.999999).finished();
    const auto r = spectral_norm(a, {1e-15, 3});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.value == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("condition number")
{
    CHECK(condition_number(MatrixXd(MatrixXd::Identity(10, 10))) == Approx(1.0).epsilon(1e-12));
    const MatrixXd rank1 = (MatrixXd(2, 2) << 1.0, 1.0, 1.0, 1.0).finished();
    CHECK(std::isinf(condition_number(rank1)));
    CHECK(smallest_singular_value(rank1).value == 0.0);
    const MatrixXd tall = (MatrixXd(3, 2) << 1.0, 0.0, 0.0, 2.0, 0.0, 0.0).finished();
    CHECK(condition_number(tall) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("regression problem shape and assumptions")
{
    SUBCASE("identity satisfies the conditioning assumption")
    {
        auto [problem, oracle] = make_lp_norm(10, 2);
        CHECK(problem.cond() == Approx(1.0).epsilon(1e-12));
        CHECK(problem.satisfies_conditioning_assumption());
        CHECK(problem.max_row_norm() == 1.0);
    }
    SUBCASE("shape mismatch")
    {
        try {
            LpRegressionProblem<double> bad(MatrixXd::Ones(3, 2), VectorXd::Ones(2), 2);
            FAIL("expected ShapeMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::shape_mismatch);
        }
        CHECK_THROWS_AS(LpRegressionProblem<double>(MatrixXd::Ones(2, 2), VectorXd::Ones(2), 0), Error);
    }
    SUBCASE("theory mode flags an ill-conditioned matrix")
    {
        const MatrixXd a = (MatrixXd(2, 3) << 1.0, 0.0, 0.0, 0.0, 2.0, 0.0).finished();
        auto [problem, oracle] = make_lp_regression(a, VectorXd(VectorXd::Zero(2)), 2, true);
        CHECK_FALSE(problem.satisfies_conditioning_assumption());
        CHECK(problem.assumption_warning());
        auto [quiet, o2] = make_lp_regression(a, VectorXd(VectorXd::Zero(2)), 2, false);
        CHECK_FALSE(quiet.assumption_warning());
    }
    SUBCASE("more rows than columns fails the assumption")
    {
        auto [problem, oracle] = make_lp_regression(MatrixXd(MatrixXd::Identity(3, 2)), VectorXd(VectorXd::Zero(3)), 2);
        CHECK_FALSE(problem.satisfies_conditioning_assumption());
    }
}

TEST_CASE("regression value, gradient and bound")
{
    const MatrixXd a = (MatrixXd(3, 2) << 1.0, 2.0, -1.0, 0.5, 0.0, 3.0).finished();
    const VectorXd b = (VectorXd(3) << 0.2, -0.1, 1.0).finished();
    for (int p = 1; p <= 4; ++p) {
        CAPTURE(p);
        LpRegressionProblem<double> problem(a, b, p);
        const VectorXd x = (VectorXd(2) << 0.3, -0.7).finished();
        const VectorXd r = a * x - b;
        CHECK(problem.value(x) == Approx(r.array().pow(2 * p).sum()).epsilon(1e-14));
        const Eigen::VectorXd fd = ref::fd_gradient([&](const Eigen::VectorXd& y) { return problem.value(y); }, x);
        CHECK((fd - Eigen::VectorXd(problem.gradient(x))).norm() <= 1e-7 * problem.gradient(x).norm());
        CHECK(problem.grad_norm_bound(x) >= problem.gradient(x).norm());
    }
}

TEST_CASE("norm-power composition pieces")
{
    auto [problem, oracle] = make_norm_power(4, 3);
    const VectorXd x = VectorXd::LinSpaced(4, -1.0, 2.0);
    const auto f = problem.objective();
    CHECK(f.value(x) == Approx(std::pow(x.squaredNorm(), 3)).epsilon(1e-14));
    CHECK((f.gradient(x) - 6.0 * std::pow(x.squaredNorm(), 2) * x).norm() <= 1e-12);
    CHECK(problem.h_double_prime(2.0) == 12.0);
    CHECK(problem.p_tail == 3);
    CHECK_THROWS_AS(make_norm_power(4, 0), Error);
    CHECK_THROWS_AS(make_squared_norm(0), Error);
}

TEST_CASE("quartic helpers")
{
    const VectorXd x = VectorXd::Constant(1, -0.5);
    CHECK(QuarticProblem<>::oracle()(x, 0.5) == 12.0);
    CHECK(QuarticProblem<>::max_curvature(x, 0.5) == 12.0);
    CHECK(QuarticProblem<>::raw_step_at_one(0.0) == Approx(1.0 / 6.0));
    CHECK(QuarticProblem<>::objective().value(x) == 0.0625);
}

TEST_CASE("regression constants")
{
    SUBCASE("A = I_10, p = 2")
    {
        auto [problem, oracle] = make_lp_norm(10, 2);
        const auto c = regression_constants(problem, 1.0);
        CHECK(c.c1 == 1.0);
        CHECK(c.c2 == Approx(12.0).epsilon(1e-12));
    }
    SUBCASE("p = 1 gives ||A||^2")
    {
        const MatrixXd a = (MatrixXd(2, 2) << 2.0, 0.0, 0.0, 1.0).finished();
        auto [problem, oracle] = make_lp_regression(a, VectorXd(VectorXd::Zero(2)), 1);
        const auto c = regression_constants(problem, 1.0);
        CHECK(c.c1 == 1.0);
        CHECK(c.c2 == Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("c1 exceeds one for a large row count")
    {
        const MatrixXd a = MatrixXd::Identity(400, 400) * 0.1;
        auto [problem, oracle] = make_lp_regression(a, VectorXd(VectorXd::Zero(400)), 2);
        const auto c = regression_constants(problem, 1.0);
        const double want_c1 = std::sqrt(400.0) / (3.0 * 0.1 * 2.0 * (1.0 + 0.01));
        CHECK(c.c1 == Approx(want_c1).epsilon(1e-10));
        CHECK(c.c2 == Approx(3.0 * 0.01 * 2.0 * (1.0 + 0.01 * want_c1 * want_c1)).epsilon(1e-10));
    }
}

TEST_CASE("residual iteration")
{
    auto [problem, oracle] = make_lp_norm(10, 2);
    SUBCASE("ones contracts by 11/12")
    {
        const VectorXd r = residual_iterate(problem, VectorXd(VectorXd::Ones(10)), 1.0);
        for (Index i = 0; i < 10; ++i)
            CHECK(r[i] == Approx(11.0 / 12.0).epsilon(1e-15));
    }
    SUBCASE("single nonzero entry")
    {
        VectorXd r0 = VectorXd::Zero(10);
        r0[4] = -0.37;
        const VectorXd r = residual_iterate(problem, r0, 1.0);
        CHECK(r[4] == Approx(-0.37 * 11.0 / 12.0).epsilon(1e-15));
        CHECK(r.norm() == Approx(0.37 * 11.0 / 12.0).epsilon(1e-15));
    }
    SUBCASE("p = 1, A = I is (1 - eta) r")
    {
        auto [p1, o1] = make_lp_norm(6, 1);
        const VectorXd r0 = VectorXd::LinSpaced(6, -1.0, 2.0);
        CHECK((residual_iterate(p1, r0, 0.3) - 0.7 * r0).norm() <= 1e-15);
    }
    SUBCASE("errors")
    {
        try {
            (void)residual_iterate(problem, VectorXd(VectorXd::Zero(10)), 1.0);
            FAIL("expected ZeroResidual");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::zero_residual);
        }
        CHECK_THROWS_AS(residual_iterate(problem, VectorXd(VectorXd::Ones(3)), 1.0), Error);
    }
}

TEST_CASE("well-conditioned random matrix")
{
    const MatrixXd a = make_well_conditioned_matrix(8, 12, 1.02, 5);
    CHECK(a.rows() == 8);
    CHECK(a.cols() == 12);
    CHECK(ref::svd_condition_number(a) == Approx(1.02).epsilon(1e-12));
    CHECK(ref::svd_spectral_norm(a) == Approx(1.02).epsilon(1e-12));
    CHECK(make_well_conditioned_matrix(8, 12, 1.02, 5) == a);
    CHECK(make_well_conditioned_matrix(8, 12, 1.02, 6) != a);
    LpRegressionProblem<double> problem(a, VectorXd::Zero(8), 2);
    CHECK(problem.spec_norm_converged());
    CHECK(problem.spec_norm() == Approx(1.02).epsilon(1e-10));
    CHECK(problem.satisfies_conditioning_assumption());
    const auto c = regression_constants(problem, 1.0);
    CHECK(c.c1 == 1.0);
    CHECK_THROWS_AS(make_well_conditioned_matrix(3, 2, 0.5, 1), Error);
}

TEST_CASE("residual iteration commutes with the x-space step on a random system")
{
    const MatrixXd a = make_well_conditioned_matrix(8, 12, 1.02, 9);
    const VectorXd b = a * VectorXd::LinSpaced(12, -1.0, 1.0);
    for (int p = 2; p <= 3; ++p) {
        auto [problem, oracle] = make_lp_regression(a, b, p, true);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
        sc.use_grad_bound = true;
        const VectorXd x = VectorXd::LinSpaced(12, 0.0, 2.0);
        const auto [next, rec] = lfso_step(oracle, problem.objective(), x, sc, sc.r_policy(x));
        const VectorXd want = residual_iterate(problem, problem.residual(x), 1.0);
        CHECK((problem.residual(next) - want).norm() <= 1e-12 * want.norm());
    }
}

TEST_CASE("regression data text format")
{
    std::istringstream in("# comment\n2 3\n1 2 3\n4 5 6\n0.5 -1\n");
    const auto data = parse_regression_data(in);
    CHECK(data.a.rows() == 2);
    CHECK(data.a(1, 2) == 6.0);
    CHECK(data.b[1] == -1.0);

    std::ostringstream out;
    write_regression_data(out, data);
    std::istringstream back(out.str());
    const auto again = parse_regression_data(back);
    CHECK(again.a == data.a);
    CHECK(again.b == data.b);

    std::istringstream short_in("2 2\n1 2\n3\n");
    try {
        (void)parse_regression_data(short_in);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
    }
    std::istringstream junk("2 x\n");
    CHECK_THROWS_AS(parse_regression_data(junk), Error);
    try {
        (void)read_regression_file("/nonexistent/file.txt");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_error);
    }
}
