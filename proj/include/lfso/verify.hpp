#pragma once

#include "lfso/problem_types.hpp"
#include "lfso/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lfso::verify {

/// Generator used for every sampled check; its name is written into reports.
using Rng = std::mt19937_64;
inline constexpr std::string_view rng_algorithm = "mt19937_64";

struct SampleSpec {
    std::size_t num_points = 1000;
    std::uint64_t seed = 0;
    std::pair<double, double> x_box{-1.0, 1.0};
    std::pair<double, double> r_range{1e-3, 1.0};

    void validate() const;
};

/// Outcome of one check. `worst_ratio` is the largest observed
/// lhs / rhs of the inequality being checked (meaning per check).
struct CheckReport {
    std::string name;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    bool skipped = false;
    std::string skip_reason;
    std::vector<std::pair<std::string, std::string>> fields;

    [[nodiscard]] bool passed() const noexcept { return violations == 0; }
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    [[nodiscard]] std::string format() const;
};

/// Shortest round-trip decimal used in all reports and CSV output.
std::string format_double(double v);

struct RateFit {
    double slope = 0.0;
    double r_squared = 0.0;
    std::size_t start_k = 0;
    std::size_t end_k = 0;
};

enum class RateClass { linear, sublinear, undetermined };

/// Points y in B(x, R) uniformly: y = x + R u^{1/d} v with v uniform on the sphere.
VectorXd sample_in_ball(Rng& rng, const VectorXd& x, double radius);
VectorXd sample_in_box(Rng& rng, Index dim, std::pair<double, double> box);
/// Log-uniform radius on r_range.
double sample_radius(Rng& rng, std::pair<double, double> r_range);

/// |f(y) - f(x) - grad f(x)^T (y - x)| <= L(x, R)/2 ||y - x||^2 on sampled (x, R, y).
CheckReport check_lfso_validity(const GradientOracle<double>& problem, const Lfso<double>& oracle,
                                const SampleSpec& spec);

/// L(x, R_i) <= L(x, R_{i+1}) (1 + 1e-14) on an increasing log grid over r_range.
CheckReport check_monotone_in_R(const Lfso<double>& oracle, Index dim, const SampleSpec& spec,
                                std::size_t grid_points = 32);

/// Per-record descent inequality, step containment, R-tilde >= R and monotone f.
CheckReport check_trace(const RunTrace<double>& trace, double eta);

/// Threshold radius of the x^4 example: root of 6R^3 + 6R - 1, raw-step
/// containment on either side of it, and R-tilde restoring containment below it.
CheckReport check_quartic_threshold();
double quartic_threshold_root();

/// D_k in [1, max(1, eta/L_g)] and effective g-stepsize eta h'(g(x_k))/L_k <= eta/L_g.
/// Needs d_k in every record and the iterates.
CheckReport check_composition_run(const CompositionProblem<double>& problem,
                                  const RunTrace<double>& trace, double eta);

/// (|sum x_i|^t, m^{t-1} sum |x_i|^t) for an m-vector x.
std::pair<double, double> holder_sides(const VectorXd& v, double t);
/// |sum x_i|^t <= m^{t-1} sum |x_i|^t on sampled tuples.
CheckReport check_holder(const SampleSpec& spec, const std::vector<double>& t_values);

/// Least-squares fit of ln(values[k]) against k over the tail window.
RateFit fit_linear_rate(const std::vector<double>& values, double window_fraction);
/// Least-squares fit of ln(values[k]) against ln(k + 1) over the tail window.
RateFit fit_power_law(const std::vector<double>& values, double window_fraction);
RateClass classify_rate(const std::vector<double>& values, double window_fraction);

/// ||r_{k+1}||_2 <= rho ||r_k||_2 with rho = max observed ratio < 1. Skipped
/// when the conditioning assumption fails. Needs the iterates.
CheckReport check_regression_qlinear(const LpRegressionProblem<double>& problem,
                                     const RunTrace<double>& trace);

/// Central differences of f against grad f: ||fd - g|| <= rel_tol ||g|| at sampled points.
CheckReport check_gradient_fd(const GradientOracle<double>& problem, const SampleSpec& spec,
                              double rel_tol = 1e-6);

/// 2 mu_g g(x) <= ||grad g(x)||^2 <= 2 L_g g(x) at sampled points.
CheckReport check_sandwich(const CompositionProblem<double>& problem, const SampleSpec& spec);

/// grad_norm_bound(x) >= ||grad f(x)|| at sampled points.
CheckReport check_grad_bound(const GradientOracle<double>& problem, const SampleSpec& spec);

} // namespace lfso::verify
