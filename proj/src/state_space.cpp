#include "platoon/state_space.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace platoon {

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Solves (z I - H) X = B for upper-Hessenberg H, O(n^2) per right-hand side.
Eigen::MatrixXcd solve_shifted_hessenberg(const Eigen::MatrixXd& H, std::complex<double> z,
                                          const Eigen::MatrixXd& B) {
    const Eigen::Index n = H.rows();
    Eigen::MatrixXcd M = (-H).cast<std::complex<double>>();
    M.diagonal().array() += z;
    Eigen::MatrixXcd X = B.cast<std::complex<double>>();

    for (Eigen::Index k = 0; k < n - 1; ++k) {
        if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
            M.row(k).tail(n - k).swap(M.row(k + 1).tail(n - k));
            X.row(k).swap(X.row(k + 1));
        }
        if (M(k, k) == std::complex<double>(0.0, 0.0)) continue;
        const std::complex<double> f = M(k + 1, k) / M(k, k);
        M.row(k + 1).tail(n - k) -= f * M.row(k).tail(n - k);
        X.row(k + 1) -= f * X.row(k);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        for (Eigen::Index j = i + 1; j < n; ++j) X.row(i) -= M(i, j) * X.row(j);
        X.row(i) /= M(i, i);
    }
    return X;
}

}  // namespace

Eigen::MatrixXcd transfer_at(const StateSpace& ss, std::complex<double> z) {
    if (ss.A.rows() == 0) return ss.D.cast<std::complex<double>>();
    Eigen::MatrixXcd M = (-ss.A).cast<std::complex<double>>();
    M.diagonal().array() += z;
    return ss.C.cast<std::complex<double>>() * M.partialPivLu().solve(ss.B.cast<std::complex<double>>()) +
           ss.D.cast<std::complex<double>>();
}

double closed_loop_norm(const StateSpace& ss, int grid_points) {
    if (grid_points < 1) throw std::invalid_argument("grid_points must be positive");
    if (ss.A.rows() == 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ss.D);
        return ss.D.size() == 0 ? 0.0 : svd.singularValues()(0);
    }
    if (spectral_radius(ss.A) >= 1.0) return std::numeric_limits<double>::infinity();

    // One Hessenberg reduction, then each frequency costs O(n^2).
    Eigen::HessenbergDecomposition<Eigen::MatrixXd> hess(ss.A);
    const Eigen::MatrixXd H = hess.matrixH();
    const Eigen::MatrixXd Q = hess.matrixQ();
    const Eigen::MatrixXd Bq = Q.transpose() * ss.B;
    const Eigen::MatrixXd Cq = ss.C * Q;

    double peak = 0.0;
    for (int j = 0; j < grid_points; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / grid_points;
        const std::complex<double> z(std::cos(theta), std::sin(theta));
        const Eigen::MatrixXcd T =
            Cq.cast<std::complex<double>>() * solve_shifted_hessenberg(H, z, Bq) +
            ss.D.cast<std::complex<double>>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T);
        peak = std::max(peak, svd.singularValues()(0));
    }
    return peak;
}

}  // namespace platoon
