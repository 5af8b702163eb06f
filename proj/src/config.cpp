#include "lfso/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lfso::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string where(const Setting& s)
{
    const std::string field = "field '" + s.key + "'";
    return s.line > 0 ? "line " + std::to_string(s.line) + ", " + field : "flag --" + s.key;
}

[[noreturn]] void fail(const Setting& s, const std::string& msg)
{
    throw Error(Errc::parse_error, where(s) + ": " + msg);
}

double to_double(const Setting& s)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s.value, &used);
        if (used == s.value.size())
            return v;
    } catch (const std::logic_error&) {
    }
    fail(s, "expected a number, got '" + s.value + "'");
}

long to_long(const Setting& s)
{
    try {
        std::size_t used = 0;
        const long v = std::stol(s.value, &used);
        if (used == s.value.size())
            return v;
    } catch (const std::logic_error&) {
    }
    fail(s, "expected an integer, got '" + s.value + "'");
}

bool to_bool(const Setting& s)
{
    std::string v = s.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    fail(s, "expected a boolean, got '" + s.value + "'");
}

} // namespace

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("LFSO_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::logic_error&) {
            throw Error(Errc::parse_error, "LFSO_SEED must be an unsigned integer");
        }
    }
    return 0;
}

std::string to_string(ProblemKind kind)
{
    switch (kind) {
    case ProblemKind::norm2_pow: return "norm2-pow";
    case ProblemKind::lp_norm: return "lp-norm";
    case ProblemKind::quartic: return "quartic";
    case ProblemKind::regression_file: return "regression-file";
    }
    return "unknown";
}

std::string to_string(SolverKind kind) { return kind == SolverKind::lfso ? "lfso" : "fixed"; }

std::vector<Setting> parse_config(std::istream& in)
{
    std::vector<Setting> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::parse_error, "line " + std::to_string(line) + ": expected 'key = value'");
        Setting s;
        s.key = trim(text.substr(0, eq));
        s.value = trim(text.substr(eq + 1));
        s.line = line;
        if (s.key.empty())
            throw Error(Errc::parse_error, "line " + std::to_string(line) + ": empty key");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Setting> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open config file " + path);
    return parse_config(in);
}

void apply_setting(ExperimentConfig& config, const Setting& setting)
{
    Setting s = setting;
    std::replace(s.key.begin(), s.key.end(), '-', '_');
    const std::string& k = s.key;

    if (k == "problem") {
        if (s.value == "norm2-pow")
            config.problem = ProblemKind::norm2_pow;
        else if (s.value == "lp-norm")
            config.problem = ProblemKind::lp_norm;
        else if (s.value == "quartic")
            config.problem = ProblemKind::quartic;
        else if (s.value == "regression-file")
            config.problem = ProblemKind::regression_file;
        else
            fail(s, "unknown problem '" + s.value + "' (norm2-pow, lp-norm, quartic, regression-file)");
    } else if (k == "solver") {
        if (s.value == "lfso")
            config.solver = SolverKind::lfso;
        else if (s.value == "fixed")
            config.solver = SolverKind::fixed;
        else
            fail(s, "unknown solver '" + s.value + "' (lfso, fixed)");
    } else if (k == "d") {
        config.d = to_long(s);
    } else if (k == "p") {
        config.p = static_cast<int>(to_long(s));
    } else if (k == "eta") {
        config.eta = to_double(s);
    } else if (k == "max_iters") {
        config.max_iters = to_long(s);
    } else if (k == "grad_tol") {
        config.grad_tol = to_double(s);
    } else if (k == "r_policy") {
        using K = RPolicySelector::Kind;
        if (s.value == "auto") {
            config.r_policy.kind = K::automatic;
        } else if (s.value == "grad-g") {
            config.r_policy.kind = K::grad_g;
        } else if (s.value == "residual-inf") {
            config.r_policy.kind = K::residual_inf;
        } else if (s.value.rfind("constant:", 0) == 0) {
            Setting c = s;
            c.value = s.value.substr(9);
            config.r_policy.kind = K::constant;
            config.r_policy.constant = to_double(c);
        } else {
            fail(s, "unknown radius policy '" + s.value + "' (auto, grad-g, residual-inf, constant:<c>)");
        }
    } else if (k == "use_grad_bound") {
        config.use_grad_bound = to_bool(s);
    } else if (k == "x0") {
        config.x0 = s.value;
    } else if (k == "matrix") {
        config.matrix_path = s.value;
    } else if (k == "seed") {
        const long v = to_long(s);
        if (v < 0)
            fail(s, "seed must be nonnegative");
        config.seed = static_cast<std::uint64_t>(v);
    } else if (k == "out") {
        config.out_path = s.value;
    } else if (k == "fit_window") {
        config.fit_window = to_double(s);
    } else if (k.size() == 6 && k.rfind("eta_p", 0) == 0 && k[5] >= '1' && k[5] <= '5') {
        config.fig1a_eta[static_cast<std::size_t>(k[5] - '1')] = to_double(s);
    } else {
        fail(s, "unknown key");
    }
}

void ExperimentConfig::validate() const
{
    auto bad = [](const std::string& field, const std::string& msg) {
        throw Error(Errc::parse_error, "field '" + field + "': " + msg);
    };
    if (d < 1)
        bad("d", "must be >= 1");
    if (p < 1)
        bad("p", "must be >= 1");
    if (!(eta > 0.0) || !std::isfinite(eta))
        bad("eta", "must be positive");
    if (solver == SolverKind::lfso && !(eta < 2.0))
        bad("eta", "must lie in (0, 2) for the LFSO solver");
    if (max_iters < 1)
        bad("max_iters", "must be positive");
    if (!(grad_tol >= 0.0))
        bad("grad_tol", "must be nonnegative");
    if (!(fit_window > 0.0 && fit_window <= 1.0))
        bad("fit_window", "must lie in (0, 1]");
    if (problem == ProblemKind::regression_file && matrix_path.empty())
        bad("matrix", "regression-file needs a matrix path");
    using K = RPolicySelector::Kind;
    if (r_policy.kind == K::constant && !(r_policy.constant > 0.0 && std::isfinite(r_policy.constant)))
        bad("r_policy", "constant radius must be positive");
    if (r_policy.kind == K::grad_g && problem != ProblemKind::norm2_pow)
        bad("r_policy", "grad-g applies to norm2-pow only");
    if (r_policy.kind == K::residual_inf && problem != ProblemKind::lp_norm &&
        problem != ProblemKind::regression_file)
        bad("r_policy", "residual-inf applies to lp-norm and regression-file only");
    for (std::size_t i = 0; i < fig1a_eta.size(); ++i)
        if (!(fig1a_eta[i] > 0.0))
            bad("eta_p" + std::to_string(i + 1), "must be positive");
}

} // namespace lfso::cli
