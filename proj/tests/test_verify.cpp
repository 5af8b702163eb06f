#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lfso/oracles.hpp"
#include "lfso/problems.hpp"
#include "lfso/solver.hpp"
#include "lfso/verify.hpp"

#include <cmath>
#include <limits>

using namespace lfso;
using namespace lfso::verify;
using doctest::Approx;

namespace {

SampleSpec spec_with(std::pair<double, double> box, std::pair<double, double> radii, std::size_t n = 1000,
                     std::uint64_t seed = 1)
{
    SampleSpec s;
    s.num_points = n;
    s.seed = seed;
    s.x_box = box;
    s.r_range = radii;
    return s;
}

RunTrace<double> quartic_trace()
{
    SolverConfig<double> sc;
    sc.r_policy = RPolicy<double>::constant(0.1);
    sc.max_iters = 200;
    return run_lfso_gd(QuarticProblem<>::oracle(), QuarticProblem<>::objective(), VectorXd(VectorXd::Ones(1)), sc);
}

} // namespace

TEST_CASE("sampling helpers")
{
    Rng rng(3);
    const VectorXd x = VectorXd::LinSpaced(5, -1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        CHECK((sample_in_ball(rng, x, 0.7) - x).norm() <= 0.7 * (1 + 1e-15));
        const double r = sample_radius(rng, {1e-3, 2.0});
        CHECK(r >= 1e-3);
        CHECK(r <= 2.0);
        const VectorXd b = sample_in_box(rng, 3, {-2.0, 5.0});
        CHECK(b.minCoeff() >= -2.0);
        CHECK(b.maxCoeff() <= 5.0);
    }
    CHECK_THROWS_AS(spec_with({1.0, 1.0}, {0.1, 1.0}).validate(), Error);
    CHECK_THROWS_AS(spec_with({0.0, 1.0}, {0.0, 1.0}).validate(), Error);
    CHECK_THROWS_AS(spec_with({0.0, 1.0}, {0.1, 1.0}, 0).validate(), Error);
}

TEST_CASE("LFSO validity")
{
    SUBCASE("quartic oracle")
    {
        const auto r = check_lfso_validity(QuarticProblem<>::objective(), QuarticProblem<>::oracle(),
                                           spec_with({-2.0, 2.0}, {1e-3, 2.0}));
        CHECK(r.checked == 1000);
        CHECK(r.violations == 0);
        CHECK(r.worst_ratio <= 1.0);
    }
    SUBCASE("squared norm with L = 2 is tight")
    {
        const auto r = check_lfso_validity(make_squared_norm(10), constant_lfso<double>({2.0}),
                                           spec_with({-1.0, 1.0}, {0.1, 2.0}));
        CHECK(r.violations == 0);
        CHECK(r.worst_ratio == Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("wrong oracle L = 1 is flagged")
    {
        const auto r = check_lfso_validity(make_squared_norm(10), constant_lfso<double>({1.0}),
                                           spec_with({-1.0, 1.0}, {0.1, 2.0}));
        CHECK(r.violations > 0);
        CHECK(r.worst_ratio == Approx(2.0).epsilon(1e-10));
        CHECK_FALSE(r.passed());
    }
    SUBCASE("composition and regression oracles for every p")
    {
        for (int p = 1; p <= 5; ++p) {
            CAPTURE(p);
            auto [c, co] = make_norm_power(6, p);
            CHECK(check_lfso_validity(c.objective(), co, spec_with({-1.0, 1.0}, {0.1, 2.0}, 300)).passed());
            auto [l, lo] = make_lp_norm(6, p);
            CHECK(check_lfso_validity(l.objective(), lo, spec_with({-1.0, 1.0}, {0.1, 2.0}, 300)).passed());
        }
    }
    SUBCASE("same seed, same report")
    {
        const auto a = check_lfso_validity(make_squared_norm(3), constant_lfso<double>({2.0}), spec_with({-1, 1}, {0.1, 1}, 50, 9));
        const auto b = check_lfso_validity(make_squared_norm(3), constant_lfso<double>({2.0}), spec_with({-1, 1}, {0.1, 1}, 50, 9));
        CHECK(a.format() == b.format());
    }
}

TEST_CASE("monotonicity in R")
{
    auto [problem, oracle] = make_norm_power(4, 2);
    CHECK(check_monotone_in_R(oracle, 4, spec_with({-1.0, 1.0}, {1e-6, 1e2}, 50)).passed());
    CHECK(check_monotone_in_R(constant_lfso<double>({3.0}), 4, spec_with({-1.0, 1.0}, {1e-6, 1e2}, 50)).passed());
    const Lfso<double> raw([](const VectorXd&, double r) { return std::max(1.0, 2.0 - r); });
    CHECK_FALSE(check_monotone_in_R(raw, 2, spec_with({-1.0, 1.0}, {1e-3, 3.0}, 5)).passed());
    const auto fixed = majorize_monotone<double>(
        std::function<double(const VectorXd&, double)>([](const VectorXd&, double r) { return std::max(1.0, 2.0 - r); }));
    CHECK(check_monotone_in_R(fixed, 2, spec_with({-1.0, 1.0}, {1e-3, 3.0}, 5)).passed());
    CHECK_THROWS_AS(check_monotone_in_R(oracle, 4, spec_with({-1.0, 1.0}, {1e-3, 1.0}, 5), 1), Error);
}

TEST_CASE("trace checks")
{
    SUBCASE("quartic run passes and R-tilde exceeds R early on")
    {
        const auto trace = quartic_trace();
        const auto r = check_trace(trace, 1.0);
        CHECK(r.passed());
        CHECK(trace.records[0].r_tilde_k > trace.records[0].r_k);
        CHECK(trace.records[0].r_tilde_k == Approx(4.0 / 24.24).epsilon(1e-14));
    }
    SUBCASE("shipped runs with eta = 1")
    {
        for (int p = 1; p <= 5; ++p) {
            auto [problem, oracle] = make_norm_power(10, p);
            SolverConfig<double> sc;
            sc.r_policy = RPolicy<double>::grad_g_norm(problem.g.gradient);
            CHECK(check_trace(run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc), 1.0).passed());
        }
    }
    SUBCASE("eta other than one")
    {
        auto [problem, oracle] = make_lp_norm(10, 3);
        for (const double eta : {0.3, 1.7}) {
            SolverConfig<double> sc;
            sc.eta = eta;
            sc.max_iters = 500;
            sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
            CHECK(check_trace(run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc), eta).passed());
        }
    }
    SUBCASE("inflated f value is flagged")
    {
        auto trace = quartic_trace();
        trace.records[5].f_val *= 0.5;
        const auto r = check_trace(trace, 1.0);
        CHECK_FALSE(r.passed());
    }
    SUBCASE("shrunk radius is flagged")
    {
        auto trace = quartic_trace();
        trace.records[0].r_tilde_k = trace.records[0].step_norm * 0.5;
        CHECK_FALSE(check_trace(trace, 1.0).passed());
    }
}

TEST_CASE("quartic threshold")
{
    const double root = quartic_threshold_root();
    CHECK(root == Approx(0.16238).epsilon(5e-6 / 0.16238));
    CHECK(6 * root * root * root + 6 * root - 1 == Approx(0.0).epsilon(1e-11));
    const auto r = check_quartic_threshold();
    CHECK(r.passed());
    CHECK(r.checked == 205);
    CHECK(r.worst_ratio <= 1.0 + 1e-14);
}

TEST_CASE("composition diagnostics")
{
    SUBCASE("p = 2 keeps D at one")
    {
        auto [problem, oracle] = make_norm_power(10, 2);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::grad_g_norm(problem.g.gradient);
        sc.record_iterates = true;
        sc.max_iters = 500;
        const auto trace = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc);
        for (const auto& rec : trace.records)
            CHECK(*rec.d_k == 1.0);
        CHECK(check_composition_run(problem, trace, 1.0).passed());
    }
    SUBCASE("p = 1 is a single step at stepsize eta / L_g")
    {
        auto [problem, oracle] = make_norm_power(10, 1);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::grad_g_norm(problem.g.gradient);
        sc.record_iterates = true;
        const auto trace = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc);
        REQUIRE(trace.num_steps() == 1);
        CHECK(*trace.records[0].d_k == 1.0);
        const auto r = check_composition_run(problem, trace, 1.0);
        CHECK(r.passed());
        CHECK(r.worst_ratio == Approx(1.0));
    }
    SUBCASE("missing diagnostics")
    {
        auto [problem, oracle] = make_norm_power(10, 2);
        SolverConfig<double> sc;
        sc.max_iters = 5;
        const auto no_iterates = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc);
        try {
            (void)check_composition_run(problem, no_iterates, 1.0);
            FAIL("expected MissingDiagnostics");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::missing_diagnostics);
        }
        sc.record_iterates = true;
        const auto no_d = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc);
        CHECK_THROWS_AS(check_composition_run(problem, no_d, 1.0), Error);
    }
}

TEST_CASE("Holder inequality")
{
    const auto eq = holder_sides((VectorXd(2) << 1.0, 1.0).finished(), 2.0);
    CHECK(eq.first == 4.0);
    CHECK(eq.second == 4.0);
    const auto cancel = holder_sides((VectorXd(2) << 1.0, -1.0).finished(), 2.0);
    CHECK(cancel.first == 0.0);
    CHECK(cancel.second == 4.0);
    const auto cube = holder_sides((VectorXd(2) << 3.0, 4.0).finished(), 3.0);
    CHECK(cube.first == Approx(343.0));
    CHECK(cube.second == Approx(364.0));
    CHECK(check_holder(spec_with({-10.0, 10.0}, {0.1, 1.0}, 500), {1.0, 1.5, 2.0, 3.0, 8.0}).passed());
    CHECK_THROWS_AS(check_holder(spec_with({-1.0, 1.0}, {0.1, 1.0}), {0.5}), Error);
}

TEST_CASE("rate fits")
{
    SUBCASE("geometric sequence")
    {
        std::vector<double> v;
        for (int k = 0; k < 100; ++k)
            v.push_back(std::pow(0.5, k));
        const auto fit = fit_linear_rate(v, 0.5);
        CHECK(fit.slope == Approx(std::log(0.5)).epsilon(1e-12));
        CHECK(fit.r_squared == Approx(1.0).epsilon(1e-12));
        CHECK(fit.start_k == 50);
        CHECK(fit.end_k == 99);
        CHECK(classify_rate(v, 0.5) == RateClass::linear);
    }
    SUBCASE("norm-power run decays by (26/27)^3")
    {
        auto [problem, oracle] = make_norm_power(10, 2);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::grad_g_norm(problem.g.gradient);
        sc.max_iters = 2000;
        const auto norms = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc).grad_norms();
        const auto fit = fit_linear_rate(norms, 0.5);
        CHECK(fit.slope == Approx(3.0 * std::log(26.0 / 27.0)).epsilon(1e-9));
        CHECK(fit.r_squared >= 1.0 - 1e-9);
    }
    SUBCASE("harmonic sequence is sublinear")
    {
        std::vector<double> v;
        for (int k = 1; k <= 10000; ++k)
            v.push_back(1.0 / k);
        const auto fit = fit_linear_rate(v, 1.0);
        CHECK(fit.r_squared < 0.9);
        CHECK(fit_power_law(v, 1.0).slope == Approx(-1.0).epsilon(1e-3));
        CHECK(classify_rate(v, 1.0) == RateClass::sublinear);
    }
    SUBCASE("window stops at zero or non-finite values")
    {
        std::vector<double> v{1.0, 0.5, 0.25, 0.125, 0.0, 5.0};
        const auto fit = fit_linear_rate(v, 1.0);
        CHECK(fit.end_k == 3);
        CHECK(fit.slope == Approx(std::log(0.5)));
    }
    SUBCASE("insufficient data")
    {
        try {
            (void)fit_linear_rate({1.0, 0.0}, 1.0);
            FAIL("expected InsufficientData");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::insufficient_data);
        }
        CHECK_THROWS_AS(fit_linear_rate({1.0, 0.5, 0.25}, 0.0), Error);
    }
}

TEST_CASE("Q-linear residual decay")
{
    SUBCASE("A = I, p = 2 gives 11/12")
    {
        auto [problem, oracle] = make_lp_norm(10, 2);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
        sc.record_iterates = true;
        sc.max_iters = 300;
        const auto r = check_regression_qlinear(problem, run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc));
        CHECK(r.passed());
        CHECK(r.worst_ratio == Approx(11.0 / 12.0).epsilon(1e-12));
    }
    SUBCASE("A = I, p = 1 gives 0")
    {
        auto [problem, oracle] = make_lp_norm(10, 1);
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
        sc.record_iterates = true;
        const auto trace = run_lfso_gd(oracle, problem.objective(), VectorXd(VectorXd::Ones(10)), sc);
        const auto r = check_regression_qlinear(problem, trace);
        CHECK(trace.num_steps() == 1);
        CHECK(r.worst_ratio == 0.0);
    }
    SUBCASE("nearly identity diagonal")
    {
        VectorXd diag = VectorXd::LinSpaced(10, 1.0, 1.009);
        auto [problem, oracle] = make_lp_regression(MatrixXd(diag.asDiagonal()), VectorXd(VectorXd::Zero(10)), 2, true);
        REQUIRE(problem.satisfies_conditioning_assumption());
        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
        sc.use_grad_bound = true;
        sc.record_iterates = true;
        sc.max_iters = 500;
        const auto r = check_regression_qlinear(problem, run_lfso_gd(oracle, problem.objective(),
                                                                     VectorXd(VectorXd::LinSpaced(10, 0.2, 1.0)), sc));
        CHECK(r.passed());
        CHECK(r.worst_ratio < 1.0);
    }
    SUBCASE("skipped when the assumption fails")
    {
        const MatrixXd a = (MatrixXd(2, 2) << 1.0, 0.0, 0.0, 3.0).finished();
        auto [problem, oracle] = make_lp_regression(a, VectorXd(VectorXd::Zero(2)), 2, true);
        const auto r = check_regression_qlinear(problem, {});
        CHECK(r.skipped);
        CHECK(r.skip_reason.rfind("AssumptionUnmet", 0) == 0);
        CHECK(r.passed());
    }
}

TEST_CASE("finite differences, sandwich and gradient bound")
{
    for (int p = 1; p <= 5; ++p) {
        CAPTURE(p);
        auto [c, co] = make_norm_power(10, p);
        auto [l, lo] = make_lp_norm(10, p);
        CHECK(check_gradient_fd(c.objective(), spec_with({-1.0, 1.0}, {0.1, 1.0}, 10)).passed());
        CHECK(check_gradient_fd(l.objective(), spec_with({-1.0, 1.0}, {0.1, 1.0}, 10)).passed());
        CHECK(check_sandwich(c, spec_with({-3.0, 3.0}, {0.1, 1.0}, 200)).passed());
        CHECK(check_grad_bound(l.objective(), spec_with({-1.0, 1.0}, {0.1, 1.0}, 200)).passed());
    }
    GradientOracle<double> wrong = make_squared_norm(3);
    wrong.gradient = [](const VectorXd& x) -> VectorXd { return 2.1 * x; };
    CHECK_FALSE(check_gradient_fd(wrong, spec_with({-1.0, 1.0}, {0.1, 1.0}, 10)).passed());
    CHECK_THROWS_AS(check_grad_bound(make_squared_norm(3), spec_with({-1.0, 1.0}, {0.1, 1.0}, 10)), Error);
}

TEST_CASE("report formatting")
{
    CheckReport r;
    r.name = "demo";
    r.checked = 3;
    r.violations = 1;
    r.worst_ratio = 0.1;
    r.set("x", 1.0 / 3.0);
    r.set("label", std::string("abc"));
    const std::string text = r.format();
    CHECK(text.find("[demo]") != std::string::npos);
    CHECK(text.find("status = FAIL") != std::string::npos);
    CHECK(text.find("x = 0.33333333333333331") != std::string::npos);
    CHECK(text.find("label = abc") != std::string::npos);
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
