#include "lfso/problems.hpp"

#include <Eigen/QR>

#include <random>

namespace lfso {

MatrixXd make_well_conditioned_matrix(Index n, Index d, double kappa, std::uint64_t seed)
{
    if (n < 1 || d < 1)
        throw Error(Errc::invalid_argument, "matrix dimensions must be positive");
    if (!(kappa >= 1.0))
        throw Error(Errc::invalid_argument, "target condition number must be >= 1");
    const Index m = std::min(n, d);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto random_orthonormal = [&](Index rows) {
        Eigen::MatrixXd g(rows, rows);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < rows; ++j)
                g(i, j) = gauss(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(rows, m));
    };
    const Eigen::MatrixXd u = random_orthonormal(n);
    const Eigen::MatrixXd v = random_orthonormal(d);
    Eigen::VectorXd s(m);
    for (Index i = 0; i < m; ++i)
        s[i] = m == 1 ? 1.0 : 1.0 + (kappa - 1.0) * static_cast<double>(i) / static_cast<double>(m - 1);
    return u * s.asDiagonal() * v.transpose();
}

} // namespace lfso
