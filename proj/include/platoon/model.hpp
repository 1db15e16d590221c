#pragma once

#include <Eigen/Dense>

namespace platoon {

/// Physical and timing constants of one homogeneous platoon.
///
/// All delays must be exact nonnegative integer multiples of the sampling
/// period; fractional delays are rejected because the delay lifting assumes
/// an integer number of delay slots.
struct VehicleParams {
    double tau = 0.1;                  ///< engine time constant [s]
    double h = 0.25;                   ///< time headway [s]
    double phi = 0.2;                  ///< input (actuation) delay [s]
    double theta = 0.02;               ///< transmission delay [s]
    double psi = 0.05;                 ///< measurement delay [s]
    double Ts = 0.01;                  ///< sampling period [s]
    double standstill_distance = 0.0;  ///< standstill spacing R_i [m]

    /// Input delay in samples (d = phi/Ts).
    int input_delay_steps() const;
    /// Transmission delay in samples (r = theta/Ts).
    int tx_delay_steps() const;
    /// Measurement delay in samples (m = psi/Ts).
    int meas_delay_steps() const;

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Exact zero-order-hold discretization of the spacing-error dynamics,
/// together with the measurement and performance maps used for synthesis.
///
/// State x = [e, de/dt, x3] where x3 = d2e/dt2 + (h/tau) u(t-phi).
struct DiscreteModel {
    Eigen::Matrix3d A;                ///< state matrix
    Eigen::Vector3d B;                ///< own-input matrix
    Eigen::Vector3d E;                ///< predecessor-input matrix
    Eigen::Matrix<double, 2, 3> C;    ///< measurement map [e; de/dt]
    Eigen::Matrix<double, 2, 3> Cz;   ///< performance-state map
    Eigen::Vector2d Dxi;              ///< performance-input map
    double eps_weight = 0.1;          ///< error weight in z
    double r_weight = 1.0;            ///< input weight in z
    double Ts = 0.01;
};

/// Continuous error dynamics (Ac, Bc, Ec) of a single vehicle pair.
void continuous_error_matrices(const VehicleParams& params, Eigen::Matrix3d& Ac,
                               Eigen::Vector3d& Bc, Eigen::Vector3d& Ec);

/// Closed-form ZOH discretization at params.Ts with performance weights
/// (eps_weight on the spacing error, r_weight on the local input).
DiscreteModel discretize(const VehicleParams& params, double eps_weight, double r_weight);

/// State matrix of the physical single-vehicle model [q, v, a] sampled at Ts.
/// The input matrix of the physical model coincides with DiscreteModel::E.
Eigen::Matrix3d vehicle_state_matrix(const VehicleParams& params);

}  // namespace platoon
