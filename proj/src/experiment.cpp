#include "lfso/experiment.hpp"

#include "lfso/oracles.hpp"
#include "lfso/problems.hpp"
#include "lfso/solver.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace lfso::cli {

namespace {

struct Setup {
    GradientOracle<double> objective;
    Lfso<double> oracle;
    RPolicy<double> policy = RPolicy<double>::constant(1.0);
    Index dim = 0;
};

RPolicy<double> default_policy_for(const ExperimentConfig& c, const GradientOracle<double>& grad_g,
                                   const MatrixXd* a, const VectorXd* b)
{
    using K = RPolicySelector::Kind;
    switch (c.r_policy.kind) {
    case K::constant: return RPolicy<double>::constant(c.r_policy.constant);
    case K::grad_g: return RPolicy<double>::grad_g_norm(grad_g.gradient);
    case K::residual_inf: return RPolicy<double>::residual_inf_norm(*a, *b);
    case K::automatic: break;
    }
    switch (c.problem) {
    case ProblemKind::norm2_pow: return RPolicy<double>::grad_g_norm(grad_g.gradient);
    case ProblemKind::lp_norm:
    case ProblemKind::regression_file: return RPolicy<double>::residual_inf_norm(*a, *b);
    case ProblemKind::quartic: break;
    }
    return RPolicy<double>::constant(0.1);
}

Setup build(const ExperimentConfig& c)
{
    Setup s;
    switch (c.problem) {
    case ProblemKind::norm2_pow: {
        auto [problem, oracle] = make_norm_power(c.d, c.p);
        s.objective = problem.objective();
        s.oracle = std::move(oracle);
        s.policy = default_policy_for(c, problem.g, nullptr, nullptr);
        break;
    }
    case ProblemKind::lp_norm:
    case ProblemKind::regression_file: {
        MatrixXd a;
        VectorXd b;
        if (c.problem == ProblemKind::lp_norm) {
            a = MatrixXd::Identity(c.d, c.d);
            b = VectorXd::Zero(c.d);
        } else {
            auto data = read_regression_file(c.matrix_path);
            a = std::move(data.a);
            b = std::move(data.b);
        }
        auto [problem, oracle] = make_lp_regression(a, b, c.p);
        s.objective = problem.objective();
        s.oracle = std::move(oracle);
        s.policy = default_policy_for(c, {}, &a, &b);
        break;
    }
    case ProblemKind::quartic:
        s.objective = QuarticProblem<>::objective();
        s.oracle = QuarticProblem<>::oracle();
        s.policy = default_policy_for(c, {}, nullptr, nullptr);
        break;
    }
    s.dim = s.objective.dim;
    return s;
}

VectorXd start_point(const ExperimentConfig& c, Index dim)
{
    if (c.x0 == "ones")
        return VectorXd::Ones(dim);
    VectorXd x0 = read_vector_file(c.x0);
    if (x0.size() != dim)
        throw Error(Errc::shape_mismatch, "x0 file has " + std::to_string(x0.size()) +
                                              " entries, problem dimension is " + std::to_string(dim));
    return x0;
}

std::string summarize(const ExperimentConfig& c, const ExperimentResult& r)
{
    using verify::format_double;
    std::ostringstream out;
    out << "problem=" << to_string(c.problem) << " p=" << c.p << " solver=" << to_string(c.solver)
        << " eta=" << format_double(c.eta) << " steps=" << r.trace.num_steps()
        << " termination=" << to_string(r.trace.termination)
        << " final_grad_ratio=" << format_double(r.grad_ratio.back());
    if (r.fit)
        out << " rate_slope=" << format_double(r.fit->slope) << " rate_r2=" << format_double(r.fit->r_squared)
            << " window=" << r.fit->start_k << '-' << r.fit->end_k;
    else
        out << " rate_slope=nan rate_r2=nan window=none";
    return out.str();
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::io_error, "cannot write " + path);
    out << contents;
    if (!out)
        throw Error(Errc::io_error, "write failed for " + path);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const Setup s = build(config);
    const VectorXd x0 = start_point(config, s.dim);

    ExperimentResult result;
    if (config.solver == SolverKind::lfso) {
        SolverConfig<double> sc;
        sc.eta = config.eta;
        sc.max_iters = config.max_iters;
        sc.grad_tol = config.grad_tol;
        sc.r_policy = s.policy;
        sc.use_grad_bound = config.use_grad_bound;
        result.trace = run_lfso_gd(s.oracle, s.objective, x0, sc);
    } else {
        result.trace = run_fixed_gd(s.objective, x0, config.eta, config.max_iters, config.grad_tol);
    }
    result.grad_ratio = grad_ratios(result.trace);
    try {
        result.fit = verify::fit_linear_rate(result.grad_ratio, config.fit_window);
    } catch (const Error& e) {
        if (e.code() != Errc::insufficient_data)
            throw;
    }
    result.summary = summarize(config, result);

    if (!config.out_path.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, result.trace);
        write_file(config.out_path, csv.str());
    }
    return result;
}

std::optional<Figure> parse_figure(const std::string& name)
{
    if (name == "fig1a")
        return Figure::fig1a;
    if (name == "fig1b")
        return Figure::fig1b;
    if (name == "fig2a")
        return Figure::fig2a;
    if (name == "fig2b")
        return Figure::fig2b;
    return std::nullopt;
}

std::string to_string(Figure figure)
{
    switch (figure) {
    case Figure::fig1a: return "fig1a";
    case Figure::fig1b: return "fig1b";
    case Figure::fig2a: return "fig2a";
    case Figure::fig2b: return "fig2b";
    }
    return "unknown";
}

ExperimentConfig figure_config(Figure figure, int p, const ExperimentConfig& base)
{
    ExperimentConfig c = base;
    c.d = 10;
    c.p = p;
    c.x0 = "ones";
    c.grad_tol = 0.0;
    c.out_path.clear();
    c.r_policy = {};
    switch (figure) {
    case Figure::fig1a:
        c.problem = ProblemKind::norm2_pow;
        c.solver = SolverKind::fixed;
        c.eta = base.fig1a_eta[static_cast<std::size_t>(p - 1)];
        break;
    case Figure::fig1b:
        c.problem = ProblemKind::lp_norm;
        c.solver = SolverKind::fixed;
        c.eta = 1e-2;
        break;
    case Figure::fig2a:
        c.problem = ProblemKind::norm2_pow;
        c.solver = SolverKind::lfso;
        c.eta = 1.0;
        c.r_policy.kind = RPolicySelector::Kind::grad_g;
        break;
    case Figure::fig2b:
        c.problem = ProblemKind::lp_norm;
        c.solver = SolverKind::lfso;
        c.eta = 1.0;
        c.r_policy.kind = RPolicySelector::Kind::residual_inf;
        break;
    }
    return c;
}

FigureResult reproduce(Figure figure, const std::string& out_dir, const ExperimentConfig& base)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(Errc::io_error, "cannot create " + out_dir + ": " + ec.message());

    std::vector<std::future<ExperimentResult>> jobs;
    for (int p = 1; p <= 5; ++p)
        jobs.push_back(std::async(std::launch::async,
                                  [cfg = figure_config(figure, p, base)] { return run_experiment(cfg); }));

    FigureResult out;
    const std::string name = to_string(figure);
    std::vector<Series> series;
    for (int p = 1; p <= 5; ++p) {
        out.runs.push_back(jobs[static_cast<std::size_t>(p - 1)].get());
        const auto& run = out.runs.back();
        std::ostringstream csv;
        write_trace_csv(csv, run.trace);
        const std::string path = (std::filesystem::path(out_dir) / (name + "_p" + std::to_string(p) + ".csv")).string();
        write_file(path, csv.str());
        out.files.push_back(path);
        series.push_back({"p = " + std::to_string(p), run.grad_ratio});
    }

    static const char* titles[] = {"Fixed-step GD, f = ||x||_2^{2p}", "Fixed-step GD (eta = 1e-2), f = ||x||_{2p}^{2p}",
                                   "LFSO GD, f = ||x||_2^{2p}", "LFSO GD, f = ||x||_{2p}^{2p}"};
    std::ostringstream svg;
    write_svg(svg, series, titles[static_cast<int>(figure)]);
    const std::string svg_path = (std::filesystem::path(out_dir) / (name + ".svg")).string();
    write_file(svg_path, svg.str());
    out.files.push_back(svg_path);
    return out;
}

} // namespace lfso::cli
