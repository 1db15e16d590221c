#pragma once

#include <Eigen/Dense>

#include "platoon/model.hpp"

namespace platoon {

/// Delay-augmented model of order N = 3 + 2d.
///
/// State layout (index map, 0-based):
///   [0..2]        x(k)                      plant error state
///   [3]           xi(k-d)                   own input, oldest slot
///   [4 .. 2+d]    xi(k-d+1) .. xi(k-1)      own-input chain, oldest to newest
///   [3+d]         nu(k-d)                   predecessor input, oldest slot
///   [4+d .. 2+2d] nu(k-d+1) .. nu(k-1)      predecessor chain, oldest to newest
/// The chains are empty for d = 1.
struct LiftedModel {
    Eigen::MatrixXd A;             ///< N x N
    Eigen::VectorXd B;             ///< N, routes xi(k) into the newest xi slot
    Eigen::VectorXd E;             ///< N, routes nu(k) into the newest nu slot
    Eigen::MatrixXd C;             ///< 2 x N performance-state map [Cz 0 0]
    Eigen::Vector2d R_perf;        ///< performance feedthrough on xi(k)
    int N = 0;                     ///< order, 3 + 2d
    int d = 0;                     ///< input delay in samples
    double eps_weight = 0.1;
    double r_weight = 1.0;
    double Ts = 0.01;
};

/// Builds the lifted system for a d-step input delay. Requires d >= 1.
LiftedModel lift(const DiscreteModel& model, int d);

/// Assembles the lifted state from an estimate of x(k) and the d most recent
/// own/predecessor inputs, ordered oldest-first (histories[0] = value at k-d,
/// histories[d-1] = value at k-1).
Eigen::VectorXd assemble_lifted_state(const Eigen::Vector3d& x_hat,
                                      const Eigen::VectorXd& xi_history,
                                      const Eigen::VectorXd& nu_history);

}  // namespace platoon
