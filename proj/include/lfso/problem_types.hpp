#pragma once

#include "lfso/linalg.hpp"
#include "lfso/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>

namespace lfso {

/// f = h o g with g L_g-smooth and mu_g-PL (g(x*) = 0), and h increasing,
/// convex, with non-decreasing h'' and h'(t) = Theta(t^p_tail) near 0.
template <typename Scalar>
struct CompositionProblem {
    using ScalarFn = std::function<Scalar(Scalar)>;

    GradientOracle<Scalar> g;
    Scalar l_g = 0;
    Scalar mu_g = 0;
    ScalarFn h;
    ScalarFn h_prime;
    ScalarFn h_double_prime;
    int p_tail = 1;

    void validate() const
    {
        if (!(l_g > 0) || !(mu_g > 0))
            throw Error(Errc::invalid_argument, "L_g and mu_g must be positive");
        if (mu_g > l_g)
            throw Error(Errc::invalid_argument, "mu_g must not exceed L_g");
        if (p_tail < 1)
            throw Error(Errc::invalid_argument, "tail exponent must be >= 1");
        if (!g.value || !g.gradient || !h || !h_prime || !h_double_prime)
            throw Error(Errc::invalid_argument, "composition problem has an unset map");
    }

    /// f(x) = h(g(x)), grad f(x) = h'(g(x)) grad g(x).
    [[nodiscard]] GradientOracle<Scalar> objective() const
    {
        GradientOracle<Scalar> f;
        f.dim = g.dim;
        f.value = [g = g, h = h](const Vector<Scalar>& x) { return h(g.value(x)); };
        f.gradient = [g = g, hp = h_prime](const Vector<Scalar>& x) -> Vector<Scalar> {
            return hp(g.value(x)) * g.gradient(x);
        };
        return f;
    }
};

/// f(x) = ||A x - b||_{2p}^{2p} with cached matrix constants.
template <typename Scalar>
class LpRegressionProblem {
public:
    using MatrixType = Matrix<Scalar>;
    using VectorType = Vector<Scalar>;

    LpRegressionProblem(MatrixType a, VectorType b, int p, const PowerIterationOptions& opts = {})
        : a_(std::move(a)), b_(std::move(b)), p_(p)
    {
        if (a_.rows() < 1 || a_.cols() < 1 || b_.size() != a_.rows())
            throw Error(Errc::shape_mismatch, "A is n x d and b must have length n");
        if (p_ < 1)
            throw Error(Errc::invalid_argument, "p must be an integer >= 1");
        if (!a_.allFinite() || !b_.allFinite())
            throw Error(Errc::non_finite_value, "A and b must be finite");
        const auto sn = spectral_norm(a_, opts);
        spec_norm_ = sn.value;
        spec_norm_converged_ = sn.converged;
        max_row_norm_ = a_.rowwise().norm().maxCoeff();
        const Scalar smin = smallest_singular_value(a_, opts).value;
        cond_ = smin > Scalar(0) ? spec_norm_ / smin : std::numeric_limits<Scalar>::infinity();
    }

    [[nodiscard]] const MatrixType& a() const noexcept { return a_; }
    [[nodiscard]] const VectorType& b() const noexcept { return b_; }
    [[nodiscard]] int p() const noexcept { return p_; }
    [[nodiscard]] Index rows() const noexcept { return a_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return a_.cols(); }
    [[nodiscard]] Scalar spec_norm() const noexcept { return spec_norm_; }
    [[nodiscard]] bool spec_norm_converged() const noexcept { return spec_norm_converged_; }
    [[nodiscard]] Scalar max_row_norm() const noexcept { return max_row_norm_; }
    [[nodiscard]] Scalar cond() const noexcept { return cond_; }

    /// Full rank, n <= d and kappa(A)^4 < n / (n - 1).
    [[nodiscard]] bool satisfies_conditioning_assumption() const
    {
        const Index n = rows();
        if (n > cols() || !std::isfinite(cond_))
            return false;
        if (n == 1)
            return true;
        return ipow(cond_, 4) < Scalar(n) / Scalar(n - 1);
    }

    /// Set when theory mode was requested but the conditioning assumption fails.
    [[nodiscard]] bool assumption_warning() const noexcept { return assumption_warning_; }
    void set_theory_mode(bool on) { assumption_warning_ = on && !satisfies_conditioning_assumption(); }

    [[nodiscard]] VectorType residual(const VectorType& x) const { return a_ * x - b_; }

    [[nodiscard]] Scalar value(const VectorType& x) const
    {
        return cwise_ipow(residual(x), 2 * p_).sum();
    }

    [[nodiscard]] VectorType gradient(const VectorType& x) const
    {
        return Scalar(2 * p_) * (a_.transpose() * cwise_ipow(residual(x), 2 * p_ - 1));
    }

    /// 2p ||A||_2 sqrt(n) ||Ax - b||_inf^{2p-1} >= ||grad f(x)||_2.
    [[nodiscard]] Scalar grad_norm_bound(const VectorType& x) const
    {
        const Scalar rinf = residual(x).template lpNorm<Eigen::Infinity>();
        return Scalar(2 * p_) * spec_norm_ * std::sqrt(Scalar(rows())) * ipow(rinf, 2 * p_ - 1);
    }

    [[nodiscard]] GradientOracle<Scalar> objective() const
    {
        GradientOracle<Scalar> f;
        f.dim = cols();
        auto self = std::make_shared<const LpRegressionProblem>(*this);
        f.value = [self](const VectorType& x) { return self->value(x); };
        f.gradient = [self](const VectorType& x) { return self->gradient(x); };
        f.grad_norm_bound = [self](const VectorType& x) { return self->grad_norm_bound(x); };
        return f;
    }

private:
    MatrixType a_;
    VectorType b_;
    int p_;
    Scalar spec_norm_ = 0;
    bool spec_norm_converged_ = false;
    Scalar max_row_norm_ = 0;
    Scalar cond_ = 0;
    bool assumption_warning_ = false;
};

} // namespace lfso
