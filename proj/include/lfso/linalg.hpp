#pragma once

#include "lfso/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace lfso {

/// x^n by repeated multiplication, n >= 0. Keeps small integer powers exact.
template <typename Scalar>
constexpr Scalar ipow(Scalar x, int n) noexcept
{
    Scalar result(1);
    Scalar base = x;
    while (n > 0) {
        if (n & 1)
            result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

/// Element-wise integer power of a vector expression.
template <typename Derived>
Vector<typename Derived::Scalar> cwise_ipow(const Eigen::MatrixBase<Derived>& v, int n)
{
    using Scalar = typename Derived::Scalar;
    return v.unaryExpr([n](Scalar e) { return ipow(e, n); });
}

template <typename Scalar>
struct PowerIterationResult {
    Scalar value = 0;
    long iterations = 0;
    bool converged = false;
};

struct PowerIterationOptions {
    double rel_tol = 1e-12;
    long max_iters = 10000;
};

/// Dominant eigenvalue of a symmetric positive semidefinite operator given by
/// its action. Stops once ||B v - lambda v|| <= rel_tol * lambda.
template <typename Scalar, typename Apply>
PowerIterationResult<Scalar> dominant_eigenvalue(Apply&& apply, Index dim,
                                                 const PowerIterationOptions& opts = {})
{
    Vector<Scalar> v(dim);
    for (Index i = 0; i < dim; ++i)
        v[i] = Scalar(1) + Scalar(0.1) * std::sin(Scalar(i + 1));
    v.normalize();

    PowerIterationResult<Scalar> out;
    for (long it = 1; it <= opts.max_iters; ++it) {
        Vector<Scalar> w = apply(v);
        const Scalar lambda = v.dot(w);
        out.value = lambda;
        out.iterations = it;
        const Scalar wn = w.norm();
        if (wn == Scalar(0)) {
            out.converged = true;
            return out;
        }
        if ((w - lambda * v).norm() <= Scalar(opts.rel_tol) * std::abs(lambda)) {
            out.converged = true;
            return out;
        }
        v = w / wn;
    }
    return out;
}

/// ||A||_2 by power iteration on A^T A, applied matrix-free.
template <typename Derived>
PowerIterationResult<typename Derived::Scalar>
spectral_norm(const Eigen::MatrixBase<Derived>& a, const PowerIterationOptions& opts = {})
{
    using Scalar = typename Derived::Scalar;
    if (a.size() == 0 || a.cwiseAbs().maxCoeff() == Scalar(0))
        throw Error(Errc::invalid_argument, "spectral_norm of a zero matrix");
    const auto& m = a.derived();
    auto res = dominant_eigenvalue<Scalar>(
        [&m](const Vector<Scalar>& v) -> Vector<Scalar> { return m.transpose() * (m * v); },
        m.cols(), opts);
    res.value = std::sqrt(std::max(res.value, Scalar(0)));
    return res;
}

/// Smallest of the min(n, d) singular values, via power iteration on the
/// inverse of the smaller Gram matrix. Returns 0 when that Gram matrix is not
/// positive definite or sigma_min <= max(n, d) sqrt(eps) max_i ||a_i||.
template <typename Derived>
PowerIterationResult<typename Derived::Scalar>
smallest_singular_value(const Eigen::MatrixBase<Derived>& a, const PowerIterationOptions& opts = {})
{
    using Scalar = typename Derived::Scalar;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Dense gram = a.rows() <= a.cols() ? Dense(a * a.transpose()) : Dense(a.transpose() * a);
    Eigen::LLT<Dense> llt(gram);
    PowerIterationResult<Scalar> out;
    if (llt.info() != Eigen::Success) {
        out.converged = true;
        return out;
    }
    auto inv = dominant_eigenvalue<Scalar>(
        [&llt](const Vector<Scalar>& v) -> Vector<Scalar> { return llt.solve(v); }, gram.rows(),
        opts);
    out = inv;
    out.value = inv.value > Scalar(0) ? Scalar(1) / std::sqrt(inv.value) : Scalar(0);
    // The Gram matrix squares kappa, so below ~sqrt(eps) ||A|| the value is noise.
    const Scalar scale = std::sqrt(gram.diagonal().maxCoeff());
    const Scalar tol = Scalar(std::max(a.rows(), a.cols())) *
                       std::sqrt(std::numeric_limits<Scalar>::epsilon()) * scale;
    if (out.value <= tol)
        out.value = Scalar(0);
    return out;
}

/// kappa(A) = ||A||_2 / sigma_min(A); infinity for rank-deficient A.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& a,
                                          const PowerIterationOptions& opts = {})
{
    using Scalar = typename Derived::Scalar;
    const Scalar smin = smallest_singular_value(a, opts).value;
    if (!(smin > Scalar(0)))
        return std::numeric_limits<Scalar>::infinity();
    return spectral_norm(a, opts).value / smin;
}

} // namespace lfso
