#include "lfso/experiment.hpp"

#include "lfso/oracles.hpp"
#include "lfso/problems.hpp"
#include "lfso/solver.hpp"

#include <cmath>
#include <sstream>

namespace lfso::cli {

namespace {

class Collector {
public:
    explicit Collector(std::uint64_t seed) : seed_(seed)
    {
        out_ << "# lfso verification report\n";
        out_ << "rng = " << verify::rng_algorithm << '\n';
        out_ << "seed = " << seed << "\n\n";
    }

    void add(const std::string& label, verify::CheckReport report)
    {
        if (!label.empty())
            report.name += " " + label;
        out_ << report.format() << '\n';
        ++checks_;
        violations_ += report.violations;
        reports_.push_back(std::move(report));
    }

    [[nodiscard]] verify::SampleSpec spec(std::pair<double, double> x_box, std::pair<double, double> r_range,
                                          std::size_t n = 1000)
    {
        // Each sampled check draws from its own stream derived from the run seed.
        verify::SampleSpec s;
        s.num_points = n;
        s.seed = seed_ + 0x9E3779B97F4A7C15ULL * ++streams_;
        s.x_box = x_box;
        s.r_range = r_range;
        return s;
    }

    VerifySummary finish()
    {
        out_ << "total_checks = " << checks_ << '\n';
        out_ << "total_violations = " << violations_ << '\n';
        return {out_.str(), violations_, checks_, std::move(reports_)};
    }

private:
    std::uint64_t seed_;
    std::uint64_t streams_ = 0;
    std::ostringstream out_;
    std::size_t checks_ = 0;
    std::size_t violations_ = 0;
    std::vector<verify::CheckReport> reports_;
};

constexpr std::pair<double, double> unit_box{-1.0, 1.0};
constexpr std::pair<double, double> radii{0.1, 2.0};

GradientOracle<double> cubic()
{
    GradientOracle<double> f;
    f.dim = 1;
    f.value = [](const VectorXd& x) { return x[0] * x[0] * x[0]; };
    f.gradient = [](const VectorXd& x) -> VectorXd { return VectorXd::Constant(1, 3.0 * x[0] * x[0]); };
    return f;
}

} // namespace

VerifySummary verify_all(std::uint64_t seed, bool include_controls)
{
    Collector c(seed);
    using namespace verify;

    // Scalar examples.
    {
        const auto f = QuarticProblem<>::objective();
        c.add("quartic", check_lfso_validity(f, QuarticProblem<>::oracle(), c.spec({-2.0, 2.0}, {1e-3, 2.0})));
        c.add("quartic", check_monotone_in_R(QuarticProblem<>::oracle(), 1, c.spec({-2.0, 2.0}, {1e-3, 2.0}, 100)));
        const auto majorant = majorize_monotone<double>(&QuarticProblem<>::max_curvature);
        c.add("quartic_majorant", check_lfso_validity(f, majorant, c.spec({-2.0, 2.0}, {1e-3, 2.0})));
        c.add("quartic_majorant", check_monotone_in_R(majorant, 1, c.spec({-2.0, 2.0}, {1e-3, 2.0}, 100)));
        c.add("quartic", check_gradient_fd(f, c.spec({-2.0, 2.0}, radii, 10)));
        c.add("", check_quartic_threshold());

        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::constant(0.1);
        sc.max_iters = 1000;
        c.add("quartic_run", check_trace(run_lfso_gd(QuarticProblem<>::oracle(), f, VectorXd(VectorXd::Ones(1)), sc), sc.eta));

        const auto cubic_oracle = hessian_lipschitz_lfso<double>(
            {[](const VectorXd& x) { return std::abs(6.0 * x[0]); }, 6.0});
        c.add("cubic_hessian_lipschitz", check_lfso_validity(cubic(), cubic_oracle, c.spec({-2.0, 2.0}, {1e-3, 2.0})));
        c.add("cubic_hessian_lipschitz", check_monotone_in_R(cubic_oracle, 1, c.spec({-2.0, 2.0}, {1e-3, 2.0}, 100)));
    }

    // Quadratic with its global constant.
    {
        const auto f = make_squared_norm(10);
        const auto oracle = constant_lfso<double>({2.0});
        c.add("quadratic_constant", check_lfso_validity(f, oracle, c.spec(unit_box, radii)));
        c.add("quadratic_constant", check_monotone_in_R(oracle, 10, c.spec(unit_box, radii, 100)));
    }

    // Composition family ||x||_2^{2p}.
    for (int p = 1; p <= 5; ++p) {
        const std::string label = "norm2_pow_p" + std::to_string(p);
        auto [problem, oracle] = make_norm_power(10, p);
        const auto f = problem.objective();
        c.add(label, check_lfso_validity(f, oracle, c.spec(unit_box, radii)));
        c.add(label, check_monotone_in_R(oracle, 10, c.spec(unit_box, {1e-6, 1e2}, 100)));
        c.add(label, check_gradient_fd(f, c.spec(unit_box, radii, 10)));
        c.add(label, check_sandwich(problem, c.spec({-3.0, 3.0}, radii)));

        SolverConfig<double> sc;
        sc.r_policy = RPolicy<double>::grad_g_norm(problem.g.gradient);
        sc.record_iterates = true;
        const auto trace = run_lfso_gd(oracle, f, VectorXd(VectorXd::Ones(10)), sc);
        c.add(label + "_run", check_trace(trace, sc.eta));
        c.add(label + "_run", check_composition_run(problem, trace, sc.eta));
    }

    // Regression family ||x||_{2p}^{2p} and a well-conditioned random system started
    // in the row space of A. Those runs stop once the residual is 1e-10 of its
    // initial size, before it reaches rounding level.
    const MatrixXd random_a = make_well_conditioned_matrix(8, 12, 1.02, seed ^ 0x5DEECE66DULL);
    const VectorXd random_b = VectorXd::Zero(8);
    for (int p = 1; p <= 5; ++p) {
        for (const bool identity : {true, false}) {
            if (!identity && p > 3)
                continue;
            const std::string label = (identity ? "lp_norm_p" : "regression8x12_p") + std::to_string(p);
            auto [problem, oracle] = identity ? make_lp_norm(10, p) : make_lp_regression(random_a, random_b, p, true);
            const auto f = problem.objective();
            const Index d = problem.cols();
            c.add(label, check_lfso_validity(f, oracle, c.spec(unit_box, radii)));
            c.add(label, check_monotone_in_R(oracle, d, c.spec(unit_box, {1e-6, 1e2}, 100)));
            c.add(label, check_gradient_fd(f, c.spec(unit_box, radii, 10)));
            c.add(label, check_grad_bound(f, c.spec(unit_box, radii)));

            SolverConfig<double> sc;
            sc.r_policy = RPolicy<double>::residual_inf_norm(problem.a(), problem.b());
            sc.use_grad_bound = true;
            sc.record_iterates = true;
            sc.max_iters = identity ? 10000 : 2000;
            const VectorXd x0 = identity ? VectorXd(VectorXd::Ones(d)) : VectorXd(random_a.transpose() * VectorXd::Ones(8));
            if (!identity)
                sc.grad_tol = f.gradient(x0).stableNorm() * std::pow(1e-10, 2 * p - 1);
            const auto trace = run_lfso_gd(oracle, f, x0, sc);
            c.add(label + "_run", check_trace(trace, sc.eta));
            c.add(label + "_run", check_regression_qlinear(problem, trace));
        }
    }

    c.add("", check_holder(c.spec({-10.0, 10.0}, radii), {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}));

    if (include_controls) {
        const auto f = make_squared_norm(10);
        c.add("control_wrong_oracle", check_lfso_validity(f, constant_lfso<double>({1.0}), c.spec(unit_box, radii)));
        const Lfso<double> raw([](const VectorXd&, double r) { return std::max(1.0, 2.0 - r); });
        c.add("control_non_monotone", check_monotone_in_R(raw, 10, c.spec(unit_box, {1e-3, 3.0}, 10)));
    }
    return c.finish();
}

} // namespace lfso::cli
