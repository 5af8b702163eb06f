#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lfso {

enum class Errc {
    invalid_argument,
    zero_oracle,
    non_finite_value,
    negative_curvature,
    grid_empty,
    shape_mismatch,
    zero_residual,
    insufficient_data,
    missing_diagnostics,
    assumption_unmet,
    parse_error,
    io_error,
};

constexpr std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::zero_oracle: return "ZeroOracle";
    case Errc::non_finite_value: return "NonFiniteValue";
    case Errc::negative_curvature: return "NegativeCurvature";
    case Errc::grid_empty: return "GridEmpty";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::zero_residual: return "ZeroResidual";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::missing_diagnostics: return "MissingDiagnostics";
    case Errc::assumption_unmet: return "AssumptionUnmet";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace lfso
