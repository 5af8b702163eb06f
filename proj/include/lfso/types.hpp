#pragma once

#include "lfso/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace lfso {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense row-major storage; rows are the data points a_i.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using Index = Eigen::Index;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v)
{
    return v.allFinite();
}

/// An objective with its gradient. `grad_norm_bound`, when set, must return
/// an upper bound C(x) >= ||grad(x)||_2.
template <typename Scalar>
struct GradientOracle {
    using VectorType = Vector<Scalar>;

    Index dim = 0;
    std::function<Scalar(const VectorType&)> value;
    std::function<VectorType(const VectorType&)> gradient;
    std::function<Scalar(const VectorType&)> grad_norm_bound;

    [[nodiscard]] bool has_grad_norm_bound() const noexcept
    {
        return static_cast<bool>(grad_norm_bound);
    }
};

/// Local first-order smoothness oracle: (x, R) -> L(x, R) >= 0,
/// non-decreasing in R for fixed x.
template <typename Scalar>
class Lfso {
public:
    using VectorType = Vector<Scalar>;
    using Fn = std::function<Scalar(const VectorType&, Scalar)>;

    Lfso() = default;
    explicit Lfso(Fn fn) : fn_(std::move(fn)) {}

    Scalar operator()(const VectorType& x, Scalar radius) const { return fn_(x, radius); }

    [[nodiscard]] explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

private:
    Fn fn_;
};

/// Rule producing the forcing radius R_k from the current iterate.
template <typename Scalar>
class RPolicy {
public:
    using VectorType = Vector<Scalar>;
    using Fn = std::function<Scalar(const VectorType&)>;

    enum class Kind { constant, grad_g_norm, residual_inf_norm, callback };

    static RPolicy constant(Scalar c)
    {
        if (!(c > Scalar(0)) || !std::isfinite(static_cast<double>(c)))
            throw Error(Errc::invalid_argument, "constant radius must be positive and finite");
        return RPolicy(Kind::constant, [c](const VectorType&) { return c; });
    }

    /// R_k = ||grad g(x_k)||_2 for f = h o g.
    static RPolicy grad_g_norm(std::function<VectorType(const VectorType&)> grad_g)
    {
        return RPolicy(Kind::grad_g_norm,
                       [grad_g = std::move(grad_g)](const VectorType& x) {
                           return grad_g(x).stableNorm();
                       });
    }

    /// R_k = ||A x_k - b||_inf.
    template <typename MatrixType>
    static RPolicy residual_inf_norm(MatrixType a, VectorType b)
    {
        return RPolicy(Kind::residual_inf_norm,
                       [a = std::move(a), b = std::move(b)](const VectorType& x) {
                           return (a * x - b).template lpNorm<Eigen::Infinity>();
                       });
    }

    static RPolicy callback(Fn fn) { return RPolicy(Kind::callback, std::move(fn)); }

    Scalar operator()(const VectorType& x) const { return fn_(x); }
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    RPolicy(Kind kind, Fn fn) : kind_(kind), fn_(std::move(fn)) {}

    Kind kind_;
    Fn fn_;
};

template <typename Scalar>
struct SolverConfig {
    Scalar eta = Scalar(1);
    long max_iters = 10000;
    Scalar grad_tol = Scalar(0);
    RPolicy<Scalar> r_policy = RPolicy<Scalar>::constant(Scalar(1));
    /// Use the problem's gradient-norm bound in place of ||grad f|| when forming R-tilde.
    bool use_grad_bound = false;
    /// Keep every iterate x_k in the trace (needed by some diagnostics).
    bool record_iterates = false;

    /// Throws unless 0 < eta < 2, max_iters > 0 and grad_tol >= 0.
    void validate() const
    {
        if (!(eta > Scalar(0) && eta < Scalar(2)))
            throw Error(Errc::invalid_argument, "eta must lie in (0, 2)");
        if (max_iters <= 0)
            throw Error(Errc::invalid_argument, "max_iters must be positive");
        if (!(grad_tol >= Scalar(0)))
            throw Error(Errc::invalid_argument, "grad_tol must be nonnegative");
    }
};

template <typename Scalar>
struct IterationRecord {
    long k = 0;
    Scalar f_val = 0;
    Scalar grad_norm = 0;
    Scalar r_k = 0;
    Scalar r_tilde_k = 0;
    Scalar l_k = 0;
    Scalar step_norm = 0;
    /// R-tilde_k / ||grad g(x_k)||, only for runs with a grad-g radius policy.
    std::optional<Scalar> d_k;
};

enum class Termination { gradient_tolerance, max_iterations, stationary_exact, oracle_zero };

constexpr std::string_view to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::gradient_tolerance: return "GradientTolerance";
    case Termination::max_iterations: return "MaxIterations";
    case Termination::stationary_exact: return "StationaryExact";
    case Termination::oracle_zero: return "OracleZero";
    }
    return "Unknown";
}

/// One record per step taken. The state reached after the last step is kept
/// in final_x / final_f / final_grad_norm.
template <typename Scalar>
struct RunTrace {
    std::vector<IterationRecord<Scalar>> records;
    Vector<Scalar> final_x;
    Scalar final_f = 0;
    Scalar final_grad_norm = 0;
    Termination termination = Termination::max_iterations;
    /// x_0, ..., x_N when SolverConfig::record_iterates is set.
    std::vector<Vector<Scalar>> iterates;

    [[nodiscard]] std::size_t num_steps() const noexcept { return records.size(); }

    /// f at x_{k+1}.
    [[nodiscard]] Scalar next_f(std::size_t k) const
    {
        return k + 1 < records.size() ? records[k + 1].f_val : final_f;
    }

    /// ||grad f(x_k)|| for k = 0..N, the last entry taken from the final state.
    [[nodiscard]] std::vector<Scalar> grad_norms() const
    {
        std::vector<Scalar> out;
        out.reserve(records.size() + 1);
        for (const auto& r : records)
            out.push_back(r.grad_norm);
        out.push_back(final_grad_norm);
        return out;
    }
};

} // namespace lfso
