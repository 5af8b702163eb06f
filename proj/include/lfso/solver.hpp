#pragma once

#include "lfso/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace lfso {

namespace detail {

template <typename Scalar>
void require_finite(Scalar v, const char* what)
{
    if (!std::isfinite(v))
        throw Error(Errc::non_finite_value, std::string(what) + " is not finite");
}

template <typename Scalar>
Scalar r_tilde_from(Scalar r_k, Scalar eta, Scalar grad_measure, Scalar l_at_r)
{
    require_finite(l_at_r, "L(x, R_k)");
    if (grad_measure == Scalar(0))
        return r_k;
    if (!(l_at_r > Scalar(0)))
        throw Error(Errc::zero_oracle, "L(x, R_k) = 0 at a non-stationary point");
    const Scalar r_tilde = std::max(r_k, eta * grad_measure / l_at_r);
    require_finite(r_tilde, "R-tilde");
    return r_tilde;
}

/// One Algorithm-1 step from x with f(x), grad f(x) already evaluated.
template <typename Scalar>
std::pair<Vector<Scalar>, IterationRecord<Scalar>>
step_from(const Lfso<Scalar>& oracle, const GradientOracle<Scalar>& problem,
          const Vector<Scalar>& x, Scalar f_val, const Vector<Scalar>& grad, Scalar grad_norm,
          const SolverConfig<Scalar>& config, Scalar r_k)
{
    if (!(r_k > Scalar(0)) || !std::isfinite(r_k))
        throw Error(Errc::invalid_argument, "forcing radius R_k must be positive and finite");

    Scalar grad_measure = grad_norm;
    if (config.use_grad_bound && problem.has_grad_norm_bound()) {
        grad_measure = problem.grad_norm_bound(x);
        require_finite(grad_measure, "gradient norm bound");
    }

    const Scalar r_tilde = r_tilde_from(r_k, config.eta, grad_measure, oracle(x, r_k));
    const Scalar l_k = oracle(x, r_tilde);
    require_finite(l_k, "L(x, R-tilde)");
    if (!(l_k > Scalar(0)))
        throw Error(Errc::zero_oracle, "L(x, R-tilde) = 0 at a non-stationary point");

    Vector<Scalar> next = x - (config.eta / l_k) * grad;
    if (!next.allFinite())
        throw Error(Errc::non_finite_value, "next iterate is not finite");

    IterationRecord<Scalar> rec;
    rec.f_val = f_val;
    rec.grad_norm = grad_norm;
    rec.r_k = r_k;
    rec.r_tilde_k = r_tilde;
    rec.l_k = l_k;
    rec.step_norm = (next - x).stableNorm();
    if (config.r_policy.kind() == RPolicy<Scalar>::Kind::grad_g_norm)
        rec.d_k = r_tilde / r_k;
    return {std::move(next), rec};
}

template <typename Scalar>
void check_start(const GradientOracle<Scalar>& problem, const Vector<Scalar>& x0)
{
    if (x0.size() != problem.dim)
        throw Error(Errc::shape_mismatch, "x0 dimension does not match the problem");
    if (x0.size() < 1)
        throw Error(Errc::invalid_argument, "dimension must be at least 1");
    if (!x0.allFinite())
        throw Error(Errc::non_finite_value, "x0 has non-finite entries");
}

} // namespace detail

/// max{R_k, eta * G / L(x, R_k)} with G = ||grad f(x)||, or the problem's
/// gradient-norm bound when `use_grad_bound` is set and one is available.
template <typename Scalar>
Scalar compute_r_tilde(const Lfso<Scalar>& oracle, const GradientOracle<Scalar>& problem,
                       const Vector<Scalar>& x, Scalar r_k, Scalar eta, bool use_grad_bound)
{
    if (!(r_k > Scalar(0)))
        throw Error(Errc::invalid_argument, "R_k must be positive");
    const Vector<Scalar> grad = problem.gradient(x);
    Scalar g = grad.stableNorm();
    detail::require_finite(g, "gradient norm");
    if (use_grad_bound && problem.has_grad_norm_bound()) {
        g = problem.grad_norm_bound(x);
        detail::require_finite(g, "gradient norm bound");
    }
    return detail::r_tilde_from(r_k, eta, g, oracle(x, r_k));
}

/// x+ = x - (eta / L(x, R-tilde)) grad f(x). Requires grad f(x) != 0.
template <typename Scalar>
std::pair<Vector<Scalar>, IterationRecord<Scalar>>
lfso_step(const Lfso<Scalar>& oracle, const GradientOracle<Scalar>& problem,
          const Vector<Scalar>& x, const SolverConfig<Scalar>& config, Scalar r_k)
{
    const Scalar f_val = problem.value(x);
    const Vector<Scalar> grad = problem.gradient(x);
    const Scalar grad_norm = grad.stableNorm();
    detail::require_finite(f_val, "f(x)");
    detail::require_finite(grad_norm, "gradient norm");
    if (grad_norm == Scalar(0))
        throw Error(Errc::invalid_argument, "lfso_step called at a stationary point");
    return detail::step_from(oracle, problem, x, f_val, grad, grad_norm, config, r_k);
}

/// Gradient descent with LFSO stepsizes. Stops on exact stationarity, the
/// gradient tolerance, or the iteration budget; the reason is recorded in
/// the trace rather than thrown.
template <typename Scalar>
RunTrace<Scalar> run_lfso_gd(const Lfso<Scalar>& oracle, const GradientOracle<Scalar>& problem,
                             const Vector<Scalar>& x0, const SolverConfig<Scalar>& config)
{
    config.validate();
    detail::check_start(problem, x0);

    RunTrace<Scalar> trace;
    trace.records.reserve(static_cast<std::size_t>(std::min<long>(config.max_iters, 1 << 20)));
    Vector<Scalar> x = x0;
    for (long k = 0;; ++k) {
        const Scalar f_val = problem.value(x);
        const Vector<Scalar> grad = problem.gradient(x);
        const Scalar grad_norm = grad.stableNorm();
        detail::require_finite(f_val, "f(x)");
        detail::require_finite(grad_norm, "gradient norm");
        if (config.record_iterates)
            trace.iterates.push_back(x);

        trace.final_f = f_val;
        trace.final_grad_norm = grad_norm;
        if (grad_norm == Scalar(0)) {
            Scalar r = config.r_policy(x);
            if (!std::isfinite(r) || r < Scalar(0))
                r = Scalar(0);
            trace.termination = oracle(x, r) == Scalar(0) ? Termination::oracle_zero
                                                          : Termination::stationary_exact;
            break;
        }
        if (grad_norm <= config.grad_tol) {
            trace.termination = Termination::gradient_tolerance;
            break;
        }
        if (k == config.max_iters) {
            trace.termination = Termination::max_iterations;
            break;
        }

        auto [next, rec] =
            detail::step_from(oracle, problem, x, f_val, grad, grad_norm, config, config.r_policy(x));
        rec.k = k;
        trace.records.push_back(rec);
        x = std::move(next);
    }
    trace.final_x = std::move(x);
    return trace;
}

/// Fixed-stepsize baseline x+ = x - eta grad f(x). Records carry r_k = R-tilde_k = 0
/// and l_k = 1/eta so both solvers share one trace layout.
template <typename Scalar>
RunTrace<Scalar> run_fixed_gd(const GradientOracle<Scalar>& problem, const Vector<Scalar>& x0,
                              Scalar eta, long max_iters, Scalar grad_tol,
                              bool record_iterates = false)
{
    if (!(eta > Scalar(0)) || !std::isfinite(eta))
        throw Error(Errc::invalid_argument, "eta must be positive");
    if (max_iters <= 0)
        throw Error(Errc::invalid_argument, "max_iters must be positive");
    detail::check_start(problem, x0);

    RunTrace<Scalar> trace;
    Vector<Scalar> x = x0;
    for (long k = 0;; ++k) {
        const Scalar f_val = problem.value(x);
        const Vector<Scalar> grad = problem.gradient(x);
        const Scalar grad_norm = grad.stableNorm();
        detail::require_finite(f_val, "f(x) (fixed-step iteration diverged)");
        detail::require_finite(grad_norm, "gradient norm (fixed-step iteration diverged)");
        if (record_iterates)
            trace.iterates.push_back(x);

        trace.final_f = f_val;
        trace.final_grad_norm = grad_norm;
        if (grad_norm == Scalar(0)) {
            trace.termination = Termination::stationary_exact;
            break;
        }
        if (grad_norm <= grad_tol) {
            trace.termination = Termination::gradient_tolerance;
            break;
        }
        if (k == max_iters) {
            trace.termination = Termination::max_iterations;
            break;
        }

        Vector<Scalar> next = x - eta * grad;
        if (!next.allFinite())
            throw Error(Errc::non_finite_value, "fixed-step iteration diverged");
        IterationRecord<Scalar> rec;
        rec.k = k;
        rec.f_val = f_val;
        rec.grad_norm = grad_norm;
        rec.l_k = Scalar(1) / eta;
        rec.step_norm = (next - x).stableNorm();
        trace.records.push_back(rec);
        x = std::move(next);
    }
    trace.final_x = std::move(x);
    return trace;
}

} // namespace lfso
