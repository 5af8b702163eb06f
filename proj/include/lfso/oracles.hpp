#pragma once

#include "lfso/linalg.hpp"
#include "lfso/problem_types.hpp"
#include "lfso/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace lfso {

template <typename Scalar>
struct ConstantLfsoParams {
    Scalar l_f = 0;
};

template <typename Scalar>
struct HessianLipschitzLfsoParams {
    std::function<Scalar(const Vector<Scalar>&)> hess_norm;
    Scalar l_h = 0;
};

/// L(x, R) = L_f for an L_f-smooth objective.
template <typename Scalar>
Lfso<Scalar> constant_lfso(const ConstantLfsoParams<Scalar>& params)
{
    if (!(params.l_f > Scalar(0)) || !std::isfinite(params.l_f))
        throw Error(Errc::invalid_argument, "constant LFSO needs l_f > 0");
    return Lfso<Scalar>([l = params.l_f](const Vector<Scalar>&, Scalar) { return l; });
}

/// L(x, R) = ||hess f(x)||_2 + L_H R.
template <typename Scalar>
Lfso<Scalar> hessian_lipschitz_lfso(HessianLipschitzLfsoParams<Scalar> params)
{
    if (!params.hess_norm)
        throw Error(Errc::invalid_argument, "Hessian norm map is unset");
    if (!(params.l_h >= Scalar(0)))
        throw Error(Errc::invalid_argument, "Hessian Lipschitz constant must be nonnegative");
    return Lfso<Scalar>([hn = std::move(params.hess_norm), l_h = params.l_h](
                            const Vector<Scalar>& x, Scalar radius) {
        const Scalar h = hn(x);
        if (!std::isfinite(h))
            throw Error(Errc::non_finite_value, "Hessian norm is not finite");
        return h + l_h * radius;
    });
}

/// Oracle for f = h o g:
///   w = L_g R + ||grad g(x)||,  u = w^2 / (2 mu_g),
///   L(x, R) = h''(u) w^2 + h'(u) L_g.
template <typename Scalar>
Lfso<Scalar> composition_lfso(const CompositionProblem<Scalar>& problem)
{
    problem.validate();
    return Lfso<Scalar>([grad_g = problem.g.gradient, l_g = problem.l_g, mu_g = problem.mu_g,
                         hp = problem.h_prime, hpp = problem.h_double_prime](
                            const Vector<Scalar>& x, Scalar radius) {
        const Scalar w = l_g * radius + grad_g(x).stableNorm();
        const Scalar v = w * w;
        const Scalar u = v / (Scalar(2) * mu_g);
        const Scalar curvature = hpp(u);
        if (curvature < Scalar(0))
            throw Error(Errc::negative_curvature, "h'' evaluated negative");
        return curvature * v + hp(u) * l_g;
    });
}

/// Oracle for ||Ax - b||_{2p}^{2p}:
///   p = 1:  2 ||A||^2
///   p >= 2: 2p(2p-1) ||A||^2 2^{2p-3} [ ||Ax-b||_inf^{2p-2} + (max_i ||a_i||)^{2p-2} R^{2p-2} ]
template <typename Scalar>
Lfso<Scalar> lp_regression_lfso(const LpRegressionProblem<Scalar>& problem)
{
    const int p = problem.p();
    const Scalar a2 = problem.spec_norm() * problem.spec_norm();
    if (p == 1)
        return Lfso<Scalar>([l = Scalar(2) * a2](const Vector<Scalar>&, Scalar) { return l; });

    const Scalar scale = Scalar(2 * p) * Scalar(2 * p - 1) * a2 * ipow(Scalar(2), 2 * p - 3);
    const Scalar row_term = ipow(problem.max_row_norm(), 2 * p - 2);
    auto shared = std::make_shared<const LpRegressionProblem<Scalar>>(problem);
    return Lfso<Scalar>([shared, p, scale, row_term](const Vector<Scalar>& x, Scalar radius) {
        const Scalar rinf = shared->residual(x).template lpNorm<Eigen::Infinity>();
        return scale * (ipow(rinf, 2 * p - 2) + row_term * ipow(radius, 2 * p - 2));
    });
}

/// 64 log-spaced radii on [1e-8, 1e4].
inline std::vector<double> default_majorant_grid()
{
    constexpr int n = 64;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = std::pow(10.0, -8.0 + 12.0 * i / (n - 1));
    return grid;
}

/// Monotone majorant of a raw bound:
///   L(x, R) = max{ raw(x, R') : R' in grid, R' <= R } joined with raw(x, R).
template <typename Scalar>
Lfso<Scalar> majorize_monotone(std::function<Scalar(const Vector<Scalar>&, Scalar)> raw,
                               std::vector<Scalar> grid)
{
    if (grid.empty())
        throw Error(Errc::grid_empty, "majorant needs at least one grid radius");
    if (!raw)
        throw Error(Errc::invalid_argument, "raw bound is unset");
    std::sort(grid.begin(), grid.end());
    return Lfso<Scalar>([raw = std::move(raw), grid = std::move(grid)](const Vector<Scalar>& x,
                                                                       Scalar radius) {
        Scalar best = raw(x, radius);
        for (const Scalar r : grid) {
            if (r > radius)
                break;
            best = std::max(best, raw(x, r));
        }
        return best;
    });
}

template <typename Scalar>
Lfso<Scalar> majorize_monotone(std::function<Scalar(const Vector<Scalar>&, Scalar)> raw)
{
    const auto g = default_majorant_grid();
    return majorize_monotone<Scalar>(std::move(raw), std::vector<Scalar>(g.begin(), g.end()));
}

} // namespace lfso
