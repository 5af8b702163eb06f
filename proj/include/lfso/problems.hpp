#pragma once

#include "lfso/linalg.hpp"
#include "lfso/oracles.hpp"
#include "lfso/problem_types.hpp"
#include "lfso/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

namespace lfso {

/// f(x) = ||x||_2^2.
template <typename Scalar = double>
GradientOracle<Scalar> make_squared_norm(Index d)
{
    if (d < 1)
        throw Error(Errc::invalid_argument, "dimension must be at least 1");
    GradientOracle<Scalar> f;
    f.dim = d;
    f.value = [](const Vector<Scalar>& x) { return x.squaredNorm(); };
    f.gradient = [](const Vector<Scalar>& x) -> Vector<Scalar> { return Scalar(2) * x; };
    return f;
}

/// f(x) = ||x||_2^{2p} as h(g(x)) with g = ||x||_2^2 (L_g = mu_g = 2) and h(t) = t^p,
/// paired with its composition oracle.
template <typename Scalar = double>
std::pair<CompositionProblem<Scalar>, Lfso<Scalar>> make_norm_power(Index d, int p)
{
    if (p < 1)
        throw Error(Errc::invalid_argument, "p must be >= 1");
    CompositionProblem<Scalar> problem;
    problem.g = make_squared_norm<Scalar>(d);
    problem.l_g = Scalar(2);
    problem.mu_g = Scalar(2);
    problem.h = [p](Scalar t) { return ipow(t, p); };
    problem.h_prime = [p](Scalar t) { return Scalar(p) * ipow(t, p - 1); };
    problem.h_double_prime = [p](Scalar t) {
        return p == 1 ? Scalar(0) : Scalar(p) * Scalar(p - 1) * ipow(t, p - 2);
    };
    problem.p_tail = p;
    auto oracle = composition_lfso(problem);
    return {std::move(problem), std::move(oracle)};
}

template <typename Scalar = double>
std::pair<LpRegressionProblem<Scalar>, Lfso<Scalar>>
make_lp_regression(Matrix<Scalar> a, Vector<Scalar> b, int p, bool theory_mode = false)
{
    LpRegressionProblem<Scalar> problem(std::move(a), std::move(b), p);
    problem.set_theory_mode(theory_mode);
    auto oracle = lp_regression_lfso(problem);
    return {std::move(problem), std::move(oracle)};
}

/// f(x) = ||x||_{2p}^{2p}: the regression family with A = I_d, b = 0.
template <typename Scalar = double>
std::pair<LpRegressionProblem<Scalar>, Lfso<Scalar>> make_lp_norm(Index d, int p)
{
    return make_lp_regression<Scalar>(Matrix<Scalar>::Identity(d, d), Vector<Scalar>::Zero(d), p);
}

/// Scalar f(x) = x^4 with L(x, R) = 24 x^2 + 24 R^2.
template <typename Scalar = double>
struct QuarticProblem {
    [[nodiscard]] static GradientOracle<Scalar> objective()
    {
        GradientOracle<Scalar> f;
        f.dim = 1;
        f.value = [](const Vector<Scalar>& x) { return ipow(x[0], 4); };
        f.gradient = [](const Vector<Scalar>& x) -> Vector<Scalar> {
            return Vector<Scalar>::Constant(1, Scalar(4) * ipow(x[0], 3));
        };
        return f;
    }

    [[nodiscard]] static Lfso<Scalar> oracle()
    {
        return Lfso<Scalar>([](const Vector<Scalar>& x, Scalar r) {
            return Scalar(24) * x[0] * x[0] + Scalar(24) * r * r;
        });
    }

    /// max_{|y - x| <= R} f''(y) = 12 (|x| + R)^2.
    [[nodiscard]] static Scalar max_curvature(const Vector<Scalar>& x, Scalar r)
    {
        const Scalar m = std::abs(x[0]) + r;
        return Scalar(12) * m * m;
    }

    /// |x_{k+1} - x_k| from x = 1, eta = 1 when the oracle is queried at R only.
    [[nodiscard]] static Scalar raw_step_at_one(Scalar r) { return Scalar(1) / (Scalar(6) + Scalar(6) * r * r); }
};

template <typename Scalar>
struct RegressionConstants {
    Scalar c1 = 1;
    Scalar c2 = 0;
};

/// c1, c2 with R-tilde_k = c1 ||r_k||_inf and L(x_k, R-tilde_k) = 2p c2 ||r_k||_inf^{2p-2}
/// under R_k = ||r_k||_inf and the gradient-norm bound.
template <typename Scalar>
RegressionConstants<Scalar> regression_constants(const LpRegressionProblem<Scalar>& problem,
                                                 Scalar eta)
{
    const int p = problem.p();
    const Scalar a = problem.spec_norm();
    if (p == 1)
        return {Scalar(1), a * a};
    const Scalar pow2 = ipow(Scalar(2), 2 * p - 3);
    const Scalar row_term = ipow(problem.max_row_norm(), 2 * p - 2);
    const Scalar c1 = std::max(Scalar(1), eta * std::sqrt(Scalar(problem.rows())) /
                                              (Scalar(2 * p - 1) * a * pow2 * (Scalar(1) + row_term)));
    // R-tilde enters the oracle as R-tilde^{2p-2}, hence c1^{2p-2}.
    const Scalar c2 = Scalar(2 * p - 1) * a * a * pow2 * (Scalar(1) + row_term * ipow(c1, 2 * p - 2));
    return {c1, c2};
}

/// One step in residual space:
///   r+ = r - eta / (c2 ||r||_inf^{2p-2}) A A^T r^{2p-1}.
template <typename Scalar>
Vector<Scalar> residual_iterate(const LpRegressionProblem<Scalar>& problem, const Vector<Scalar>& r,
                                Scalar eta)
{
    if (r.size() != problem.rows())
        throw Error(Errc::shape_mismatch, "residual length must equal the number of rows");
    const Scalar rinf = r.template lpNorm<Eigen::Infinity>();
    if (rinf == Scalar(0))
        throw Error(Errc::zero_residual, "residual is already zero");
    const int p = problem.p();
    const auto c = regression_constants(problem, eta);
    const Scalar factor = eta / (c.c2 * ipow(rinf, 2 * p - 2));
    const auto& a = problem.a();
    return r - factor * (a * (a.transpose() * cwise_ipow(r, 2 * p - 1)));
}

/// Parsed plain-text regression data: "n d", n rows of d floats, then b.
/// `#` starts a comment.
struct RegressionData {
    MatrixXd a;
    VectorXd b;
};

RegressionData parse_regression_data(std::istream& in);
RegressionData read_regression_file(const std::string& path);
void write_regression_data(std::ostream& out, const RegressionData& data);

/// Whitespace-separated floats.
VectorXd read_vector_file(const std::string& path);

/// n x d matrix U diag(s) V^T with random orthonormal U, V and singular values
/// evenly spaced in [1, kappa]; seeded and deterministic.
MatrixXd make_well_conditioned_matrix(Index n, Index d, double kappa, std::uint64_t seed);

} // namespace lfso
