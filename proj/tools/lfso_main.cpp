#include "lfso/error.hpp"
#include "lfso/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

using namespace lfso;
using namespace lfso::cli;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violations = 1;
constexpr int exit_usage = 2;

const char* const run_keys[] = {"problem", "solver",  "d",     "p",      "eta",        "max-iters", "grad-tol",
                                "r-policy", "use-grad-bound", "x0", "matrix", "seed", "out", "fit-window"};
const char* const eta_keys[] = {"eta-p1", "eta-p2", "eta-p3", "eta-p4", "eta-p5"};

struct FlagValues {
    std::map<std::string, std::string> values;
    std::string config_path;

    void add_to(CLI::App* app, const char* const* begin, const char* const* end)
    {
        for (auto it = begin; it != end; ++it)
            app->add_option(std::string("--") + *it, values[*it]);
    }

    ExperimentConfig build(CLI::App* app) const
    {
        ExperimentConfig config;
        config.seed = default_seed();
        if (!config_path.empty())
            for (const auto& s : read_config_file(config_path))
                apply_setting(config, s);
        for (const auto& [key, value] : values)
            if (app->count("--" + key) > 0)
                apply_setting(config, {key, value, 0});
        return config;
    }
};

int write_or_print(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return exit_ok;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw Error(Errc::io_error, "cannot write " + path);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gradient descent with local first-order smoothness oracles"};
    app.require_subcommand(1);

    FlagValues run_flags;
    auto* run = app.add_subcommand("run", "Run one solver on one problem and write a trace CSV");
    run->add_option("--config", run_flags.config_path, "key = value config file");
    run_flags.add_to(run, std::begin(run_keys), std::end(run_keys));

    FlagValues rep_flags;
    std::string figure_name;
    std::string out_dir = ".";
    auto* rep = app.add_subcommand("reproduce", "Regenerate one figure as CSV files and an SVG plot");
    rep->add_option("--figure", figure_name, "fig1a, fig1b, fig2a or fig2b")->required();
    rep->add_option("--out-dir", out_dir, "output directory");
    rep->add_option("--config", rep_flags.config_path, "key = value config file");
    rep_flags.add_to(rep, std::begin(eta_keys), std::end(eta_keys));
    rep->add_option("--max-iters", rep_flags.values["max-iters"]);
    rep->add_option("--fit-window", rep_flags.values["fit-window"]);

    std::uint64_t seed = 0;
    bool controls = false;
    std::string report_path;
    auto* ver = app.add_subcommand("verify", "Run the verification suite on every shipped problem");
    ver->add_option("--seed", seed, "sampling seed (default: LFSO_SEED or 0)");
    ver->add_flag("--controls", controls, "include deliberately invalid oracles");
    ver->add_option("--out", report_path, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run) {
            const auto config = run_flags.build(run);
            const auto result = run_experiment(config);
            std::cout << result.summary << '\n';
            return exit_ok;
        }
        if (*rep) {
            const auto figure = parse_figure(figure_name);
            if (!figure) {
                std::cerr << "error: unknown figure '" << figure_name << "' (fig1a, fig1b, fig2a, fig2b)\n";
                return exit_usage;
            }
            const auto base = rep_flags.build(rep);
            const auto result = reproduce(*figure, out_dir, base);
            for (const auto& r : result.runs)
                std::cout << r.summary << '\n';
            for (const auto& f : result.files)
                std::cout << "wrote " << f << '\n';
            return exit_ok;
        }
        if (ver->count("--seed") == 0)
            seed = default_seed();
        const auto summary = verify_all(seed, controls);
        write_or_print(report_path, summary.report);
        std::cerr << summary.checks << " checks, " << summary.violations << " violations\n";
        return summary.violations == 0 ? exit_ok : exit_violations;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
        case Errc::parse_error:
        case Errc::invalid_argument:
        case Errc::shape_mismatch:
            return exit_usage;
        default:
            return exit_violations;
        }
    }
}
