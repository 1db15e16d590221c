#pragma once

#include <Eigen/Dense>
#include <complex>

namespace platoon {

/// Plain discrete-time state-space quadruple y = C x + D u.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
};

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const Eigen::MatrixXd& A);

/// Transfer matrix C (zI - A)^{-1} B + D at one point of the complex plane.
Eigen::MatrixXcd transfer_at(const StateSpace& ss, std::complex<double> z);

/// Peak singular value of the transfer matrix over a uniform grid of
/// `grid_points` points on the unit circle. Returns +infinity when A is not
/// Schur stable. Grids whose size doubles reuse all previous points, so the
/// estimate is nondecreasing under refinement.
double closed_loop_norm(const StateSpace& ss, int grid_points = 2048);

}  // namespace platoon
