#include "lfso/verify.hpp"

#include "lfso/linalg.hpp"
#include "lfso/problems.hpp"
#include "lfso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace lfso::verify {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double tiny_floor = 1e-300;

CheckReport make_report(std::string name)
{
    CheckReport r;
    r.name = std::move(name);
    return r;
}

void note_spec(CheckReport& r, const SampleSpec& spec)
{
    r.set("rng", std::string(rng_algorithm));
    r.set("seed", std::to_string(spec.seed));
    r.set("samples", std::to_string(spec.num_points));
}

struct Window {
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t start = 0;
    std::size_t end = 0;
};

Window tail_window(const std::vector<double>& values, double window_fraction, bool log_k)
{
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw Error(Errc::invalid_argument, "window_fraction must lie in (0, 1]");
    std::size_t n = 0;
    while (n < values.size() && std::isfinite(values[n]) && values[n] >= tiny_floor)
        ++n;
    const auto len = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n)));
    if (len < 3)
        throw Error(Errc::insufficient_data, "rate fit needs at least 3 positive values");
    Window w;
    w.start = n - len;
    w.end = n - 1;
    for (std::size_t k = w.start; k < n; ++k) {
        w.xs.push_back(log_k ? std::log(static_cast<double>(k + 1)) : static_cast<double>(k));
        w.ys.push_back(std::log(values[k]));
    }
    return w;
}

RateFit least_squares(const Window& w)
{
    const auto n = static_cast<double>(w.xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < w.xs.size(); ++i) {
        mx += w.xs[i];
        my += w.ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < w.xs.size(); ++i) {
        const double dx = w.xs[i] - mx;
        const double dy = w.ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    fit.start_k = w.start;
    fit.end_k = w.end;
    fit.slope = sxy / sxx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        double ss_res = 0;
        for (std::size_t i = 0; i < w.xs.size(); ++i) {
            const double e = w.ys[i] - (my + fit.slope * (w.xs[i] - mx));
            ss_res += e * e;
        }
        fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return fit;
}

} // namespace

void SampleSpec::validate() const
{
    if (num_points == 0)
        throw Error(Errc::invalid_argument, "num_points must be positive");
    if (!(x_box.first < x_box.second))
        throw Error(Errc::invalid_argument, "x_box needs low < high");
    if (!(r_range.first > 0.0 && r_range.first < r_range.second))
        throw Error(Errc::invalid_argument, "r_range needs 0 < low < high");
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CheckReport::set(const std::string& key, double value) { set(key, format_double(value)); }

void CheckReport::set(const std::string& key, const std::string& value)
{
    for (auto& [k, v] : fields) {
        if (k == key) {
            v = value;
            return;
        }
    }
    fields.emplace_back(key, value);
}

std::string CheckReport::format() const
{
    std::ostringstream out;
    out << '[' << name << "]\n";
    out << "status = " << (skipped ? "skipped" : passed() ? "pass" : "FAIL") << '\n';
    if (skipped)
        out << "skip_reason = " << skip_reason << '\n';
    out << "checked = " << checked << '\n';
    out << "violations = " << violations << '\n';
    out << "worst_ratio = " << format_double(worst_ratio) << '\n';
    for (const auto& [k, v] : fields)
        out << k << " = " << v << '\n';
    return out.str();
}

VectorXd sample_in_box(Rng& rng, Index dim, std::pair<double, double> box)
{
    std::uniform_real_distribution<double> u(box.first, box.second);
    VectorXd x(dim);
    for (Index i = 0; i < dim; ++i)
        x[i] = u(rng);
    return x;
}

double sample_radius(Rng& rng, std::pair<double, double> r_range)
{
    std::uniform_real_distribution<double> u(std::log(r_range.first), std::log(r_range.second));
    return std::exp(u(rng));
}

VectorXd sample_in_ball(Rng& rng, const VectorXd& x, double radius)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorXd v(x.size());
    do {
        for (Index i = 0; i < v.size(); ++i)
            v[i] = gauss(rng);
    } while (v.norm() == 0.0);
    v.normalize();
    const double scale = radius * std::pow(unif(rng), 1.0 / static_cast<double>(x.size()));
    return x + scale * v;
}

CheckReport check_lfso_validity(const GradientOracle<double>& problem, const Lfso<double>& oracle,
                                const SampleSpec& spec)
{
    spec.validate();
    auto report = make_report("lfso_validity");
    note_spec(report, spec);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_points; ++i) {
        const VectorXd x = sample_in_box(rng, problem.dim, spec.x_box);
        const double radius = sample_radius(rng, spec.r_range);
        const VectorXd y = sample_in_ball(rng, x, radius);
        const VectorXd s = y - x;

        const double fx = problem.value(x);
        const double fy = problem.value(y);
        const double gs = problem.gradient(x).dot(s);
        const double lhs = std::abs(fy - fx - gs);
        const double rhs = 0.5 * oracle(x, radius) * s.squaredNorm();
        const double rounding = 4.0 * eps * (std::abs(fx) + std::abs(fy) + std::abs(gs));

        ++report.checked;
        if (rhs > 0.0)
            report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
        else if (lhs > rounding)
            report.worst_ratio = std::numeric_limits<double>::infinity();
        if (lhs > rhs * (1.0 + 1e-10) + rounding)
            ++report.violations;
    }
    return report;
}

CheckReport check_monotone_in_R(const Lfso<double>& oracle, Index dim, const SampleSpec& spec,
                                std::size_t grid_points)
{
    spec.validate();
    if (grid_points < 2)
        throw Error(Errc::invalid_argument, "monotonicity grid needs at least two radii");
    auto report = make_report("monotone_in_R");
    note_spec(report, spec);
    std::vector<double> grid(grid_points);
    const double lo = std::log(spec.r_range.first);
    const double hi = std::log(spec.r_range.second);
    for (std::size_t i = 0; i < grid_points; ++i)
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1));

    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_points; ++i) {
        const VectorXd x = sample_in_box(rng, dim, spec.x_box);
        double prev = oracle(x, grid.front());
        for (std::size_t j = 1; j < grid.size(); ++j) {
            const double cur = oracle(x, grid[j]);
            ++report.checked;
            if (cur > 0.0)
                report.worst_ratio = std::max(report.worst_ratio, prev / cur);
            if (prev > cur * (1.0 + 1e-14))
                ++report.violations;
            prev = cur;
        }
    }
    return report;
}

CheckReport check_trace(const RunTrace<double>& trace, double eta)
{
    auto report = make_report("trace");
    const double coef = eta * (2.0 - eta) / 2.0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t descent_bad = 0, containment_bad = 0, radius_bad = 0, monotone_bad = 0;
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& rec = trace.records[k];
        const double f_next = trace.next_f(k);
        const double slack = 1e-12 * std::abs(rec.f_val) + tiny_floor;
        const double decrease = rec.f_val - f_next;
        const double required = coef / rec.l_k * rec.grad_norm * rec.grad_norm;

        ++report.checked;
        min_margin = std::min(min_margin, decrease - required);
        if (decrease < required - slack)
            ++descent_bad;
        if (f_next > rec.f_val + slack)
            ++monotone_bad;
        if (rec.r_tilde_k > 0.0)
            report.worst_ratio = std::max(report.worst_ratio, rec.step_norm / rec.r_tilde_k);
        if (rec.step_norm > rec.r_tilde_k * (1.0 + 1e-12))
            ++containment_bad;
        if (rec.r_tilde_k < rec.r_k)
            ++radius_bad;
    }
    report.violations = descent_bad + containment_bad + radius_bad + monotone_bad;
    report.set("descent_violations", static_cast<double>(descent_bad));
    report.set("containment_violations", static_cast<double>(containment_bad));
    report.set("radius_violations", static_cast<double>(radius_bad));
    report.set("monotone_violations", static_cast<double>(monotone_bad));
    report.set("min_descent_margin", trace.records.empty() ? 0.0 : min_margin);
    report.set("termination", std::string(to_string(trace.termination)));
    return report;
}

double quartic_threshold_root()
{
    auto poly = [](double r) { return 6.0 * r * r * r + 6.0 * r - 1.0; };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (poly(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CheckReport check_quartic_threshold()
{
    auto report = make_report("quartic_threshold");
    const double root = quartic_threshold_root();
    report.set("root", root);

    auto expect = [&report](bool ok) {
        ++report.checked;
        if (!ok)
            ++report.violations;
    };
    expect(root >= 0.162375 && root <= 0.162385);
    for (const double margin : {0.01, 0.1}) {
        const double below = root * (1.0 - margin);
        const double above = root * (1.0 + margin);
        expect(QuarticProblem<>::raw_step_at_one(below) > below);
        expect(QuarticProblem<>::raw_step_at_one(above) < above);
    }

    const auto problem = QuarticProblem<>::objective();
    const auto oracle = QuarticProblem<>::oracle();
    SolverConfig<double> config;
    config.eta = 1.0;
    const VectorXd x = VectorXd::Ones(1);
    constexpr int n = 200;
    for (int i = 0; i < n; ++i) {
        const double r = std::exp(std::log(1e-3) + (std::log(root) - std::log(1e-3)) * i / (n - 1));
        const auto [next, rec] = lfso_step(oracle, problem, x, config, r);
        report.worst_ratio = std::max(report.worst_ratio, rec.step_norm / rec.r_tilde_k);
        expect(rec.step_norm <= rec.r_tilde_k * (1.0 + 1e-14));
    }
    return report;
}

CheckReport check_composition_run(const CompositionProblem<double>& problem,
                                  const RunTrace<double>& trace, double eta)
{
    if (trace.iterates.size() < trace.records.size())
        throw Error(Errc::missing_diagnostics, "composition check needs the recorded iterates");
    auto report = make_report("composition_run");
    const double d_hi = std::max(1.0, eta / problem.l_g);
    const double step_cap = eta / problem.l_g;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = 0.0;
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& rec = trace.records[k];
        if (!rec.d_k)
            throw Error(Errc::missing_diagnostics, "record lacks d_k (run with the grad-g radius policy)");
        const double d = *rec.d_k;
        d_min = std::min(d_min, d);
        d_max = std::max(d_max, d);
        const double eff = eta * problem.h_prime(problem.g.value(trace.iterates[k])) / rec.l_k;
        min_step = std::min(min_step, eff);
        max_step = std::max(max_step, eff);
        report.worst_ratio = std::max(report.worst_ratio, eff / step_cap);

        report.checked += 2;
        if (d < 1.0 - 1e-12 || d > d_hi + 1e-12)
            ++report.violations;
        if (eff > step_cap * (1.0 + 1e-12))
            ++report.violations;
    }
    report.set("d_upper_bound", d_hi);
    if (!trace.records.empty()) {
        report.set("d_min", d_min);
        report.set("d_max", d_max);
        report.set("min_effective_step", min_step);
        report.set("max_effective_step", max_step);
    }
    return report;
}

std::pair<double, double> holder_sides(const VectorXd& v, double t)
{
    const double lhs = std::pow(std::abs(v.sum()), t);
    const double rhs = std::pow(static_cast<double>(v.size()), t - 1.0) * v.cwiseAbs().array().pow(t).sum();
    return {lhs, rhs};
}

CheckReport check_holder(const SampleSpec& spec, const std::vector<double>& t_values)
{
    spec.validate();
    auto report = make_report("holder");
    note_spec(report, spec);
    Rng rng(spec.seed);
    std::uniform_int_distribution<int> size_dist(1, 8);
    std::uniform_real_distribution<double> entry(spec.x_box.first, spec.x_box.second);
    for (const double t : t_values) {
        if (!(t >= 1.0))
            throw Error(Errc::invalid_argument, "Holder exponent must be >= 1");
        for (std::size_t i = 0; i < spec.num_points; ++i) {
            VectorXd v(size_dist(rng));
            for (Index j = 0; j < v.size(); ++j)
                v[j] = entry(rng);
            const auto [lhs, rhs] = holder_sides(v, t);
            ++report.checked;
            if (rhs > 0.0)
                report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
            if (lhs > rhs * (1.0 + 1e-12))
                ++report.violations;
        }
    }
    return report;
}

RateFit fit_linear_rate(const std::vector<double>& values, double window_fraction)
{
    return least_squares(tail_window(values, window_fraction, false));
}

RateFit fit_power_law(const std::vector<double>& values, double window_fraction)
{
    return least_squares(tail_window(values, window_fraction, true));
}

RateClass classify_rate(const std::vector<double>& values, double window_fraction)
{
    const RateFit lin = fit_linear_rate(values, window_fraction);
    if (lin.r_squared >= 0.99)
        return RateClass::linear;
    const RateFit pw = fit_power_law(values, window_fraction);
    return pw.r_squared > lin.r_squared ? RateClass::sublinear : RateClass::undetermined;
}

CheckReport check_regression_qlinear(const LpRegressionProblem<double>& problem,
                                     const RunTrace<double>& trace)
{
    auto report = make_report("regression_qlinear");
    report.set("kappa", problem.cond());
    if (!problem.satisfies_conditioning_assumption()) {
        report.skipped = true;
        report.skip_reason = std::string(to_string(Errc::assumption_unmet)) +
                             ": kappa(A)^4 >= n/(n-1) or A not full row rank";
        return report;
    }
    if (trace.iterates.size() < 2 && !trace.records.empty())
        throw Error(Errc::missing_diagnostics, "Q-linear check needs the recorded iterates");

    std::vector<double> norms;
    norms.reserve(trace.iterates.size() + 1);
    for (const auto& x : trace.iterates)
        norms.push_back(problem.residual(x).stableNorm());
    if (trace.iterates.size() == trace.records.size())
        norms.push_back(problem.residual(trace.final_x).stableNorm());

    double rho = 0.0;
    for (std::size_t k = 0; k + 1 < norms.size(); ++k) {
        if (norms[k] == 0.0)
            break;
        ++report.checked;
        rho = std::max(rho, norms[k + 1] / norms[k]);
    }
    report.worst_ratio = rho;
    report.set("rho", rho);
    if (!(rho < 1.0))
        ++report.violations;
    return report;
}

CheckReport check_gradient_fd(const GradientOracle<double>& problem, const SampleSpec& spec,
                              double rel_tol)
{
    spec.validate();
    auto report = make_report("gradient_fd");
    note_spec(report, spec);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_points; ++i) {
        const VectorXd x = sample_in_box(rng, problem.dim, spec.x_box);
        const VectorXd g = problem.gradient(x);
        VectorXd fd(x.size());
        for (Index j = 0; j < x.size(); ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
            VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            fd[j] = (problem.value(xp) - problem.value(xm)) / (xp[j] - xm[j]);
        }
        const double err = (fd - g).norm();
        const double scale = std::max(g.norm(), tiny_floor);
        ++report.checked;
        report.worst_ratio = std::max(report.worst_ratio, err / scale);
        if (err > rel_tol * scale)
            ++report.violations;
    }
    report.set("rel_tol", rel_tol);
    return report;
}

CheckReport check_sandwich(const CompositionProblem<double>& problem, const SampleSpec& spec)
{
    spec.validate();
    auto report = make_report("pl_smooth_sandwich");
    note_spec(report, spec);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_points; ++i) {
        const VectorXd x = sample_in_box(rng, problem.g.dim, spec.x_box);
        const double gv = problem.g.value(x);
        const double gg = problem.g.gradient(x).squaredNorm();
        const double slack = 1e-12 * gg + tiny_floor;
        report.checked += 2;
        if (2.0 * problem.mu_g * gv > gg + slack)
            ++report.violations;
        if (gg > 2.0 * problem.l_g * gv + slack)
            ++report.violations;
        if (gv > 0.0)
            report.worst_ratio = std::max(report.worst_ratio, gg / (2.0 * problem.l_g * gv));
    }
    return report;
}

CheckReport check_grad_bound(const GradientOracle<double>& problem, const SampleSpec& spec)
{
    spec.validate();
    if (!problem.has_grad_norm_bound())
        throw Error(Errc::invalid_argument, "problem has no gradient-norm bound");
    auto report = make_report("grad_norm_bound");
    note_spec(report, spec);
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_points; ++i) {
        const VectorXd x = sample_in_box(rng, problem.dim, spec.x_box);
        const double gn = problem.gradient(x).norm();
        const double bound = problem.grad_norm_bound(x);
        ++report.checked;
        if (bound > 0.0)
            report.worst_ratio = std::max(report.worst_ratio, gn / bound);
        if (gn > bound * (1.0 + 1e-12))
            ++report.violations;
    }
    return report;
}

} // namespace lfso::verify
