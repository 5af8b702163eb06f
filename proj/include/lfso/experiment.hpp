#pragma once

#include "lfso/types.hpp"
#include "lfso/verify.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lfso::cli {

enum class ProblemKind { norm2_pow, lp_norm, quartic, regression_file };
enum class SolverKind { lfso, fixed };

/// "auto" picks the per-family default: grad-g for norm2-pow, residual-inf for
/// the regression families, constant 0.1 for quartic.
struct RPolicySelector {
    enum class Kind { automatic, constant, grad_g, residual_inf } kind = Kind::automatic;
    double constant = 1.0;
};

struct ExperimentConfig {
    ProblemKind problem = ProblemKind::norm2_pow;
    SolverKind solver = SolverKind::lfso;
    long d = 10;
    int p = 2;
    double eta = 1.0;
    long max_iters = 10000;
    double grad_tol = 0.0;
    RPolicySelector r_policy;
    bool use_grad_bound = false;
    std::string x0 = "ones";
    std::string matrix_path;
    std::uint64_t seed = 0;
    std::string out_path;
    double fit_window = 0.5;
    /// Fixed stepsizes for fig1a, indexed by p - 1.
    std::array<double, 5> fig1a_eta{1e-1, 1e-2, 1e-3, 1e-4, 1e-6};

    /// Throws Error(parse_error) naming the offending field.
    void validate() const;
};

/// Seed from LFSO_SEED, or 0 when unset.
std::uint64_t default_seed();

/// One `key = value` assignment; `line` is 1-based, 0 for command-line flags.
struct Setting {
    std::string key;
    std::string value;
    int line = 0;
};

/// `key = value` lines, `#` starts a comment. Keys may use '-' or '_'.
std::vector<Setting> parse_config(std::istream& in);
std::vector<Setting> read_config_file(const std::string& path);
void apply_setting(ExperimentConfig& config, const Setting& setting);

std::string to_string(ProblemKind kind);
std::string to_string(SolverKind kind);

struct ExperimentResult {
    RunTrace<double> trace;
    std::vector<double> grad_ratio;
    std::optional<verify::RateFit> fit;
    std::string summary;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// grad_norm(k) / grad_norm(0) for k = 0..N.
std::vector<double> grad_ratios(const RunTrace<double>& trace);

/// Header "k,f,grad_norm,R,R_tilde,L,step_norm,grad_ratio"; one row per step plus
/// a final row for the last state (step columns "nan"); 17 significant digits.
void write_trace_csv(std::ostream& out, const RunTrace<double>& trace);

struct CsvRow {
    long k = 0;
    double f = 0, grad_norm = 0, r = 0, r_tilde = 0, l = 0, step_norm = 0, grad_ratio = 0;
};
std::vector<CsvRow> parse_trace_csv(std::istream& in);

struct Series {
    std::string label;
    std::vector<double> values;
};

/// Self-contained SVG: log10(value) against k, one polyline per series.
void write_svg(std::ostream& out, const std::vector<Series>& series, const std::string& title);

enum class Figure { fig1a, fig1b, fig2a, fig2b };
std::optional<Figure> parse_figure(const std::string& name);
std::string to_string(Figure figure);

/// Per-p configuration used by `reproduce` for a figure; `base` supplies
/// max_iters, fit_window and the fig1a stepsizes.
ExperimentConfig figure_config(Figure figure, int p, const ExperimentConfig& base);

struct FigureResult {
    std::vector<ExperimentResult> runs; // p = 1..5
    std::vector<std::string> files;
};

/// Runs p = 1..5, writes <out_dir>/<figure>_p<p>.csv and <out_dir>/<figure>.svg.
FigureResult reproduce(Figure figure, const std::string& out_dir, const ExperimentConfig& base);

struct VerifySummary {
    std::string report;
    std::size_t violations = 0;
    std::size_t checks = 0;
    std::vector<verify::CheckReport> reports;
};

/// Runs every verification check on every shipped problem/oracle pair and the
/// shipped experiment traces. The control flag adds a deliberately invalid
/// oracle and a non-monotone raw bound, both of which must be flagged.
VerifySummary verify_all(std::uint64_t seed, bool include_controls = false);

} // namespace lfso::cli
