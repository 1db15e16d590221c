#pragma once

#include <Eigen/Dense>
#include <utility>

#include "platoon/model.hpp"

namespace platoon {

/// Unknown-input observer gains with deadbeat error dynamics:
///   zeta(k+1) = F zeta(k) + G B xi_d(k) + K y(k)
///   x_hat(k)  = zeta(k) + H y(k)
/// (I - H C) E = 0 decouples the estimate from the unmeasured predecessor
/// input; F = A - K1 C - H C A is nilpotent so the error vanishes in at most
/// n steps.
struct ObserverGains {
    Eigen::MatrixXd F;
    Eigen::MatrixXd G;
    Eigen::MatrixXd H;
    Eigen::MatrixXd K1;
    Eigen::MatrixXd K2;
    Eigen::MatrixXd K;   ///< K1 + K2
    Eigen::VectorXd GB;  ///< G * B, the term driving zeta
};

/// Synthesizes the observer for x(k+1) = A x + B xi + E nu, y = C x.
/// Throws InfeasibleError when C E is rank deficient or the pair
/// (A - H C A, C) is unobservable.
ObserverGains synthesize_uio(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                             const Eigen::MatrixXd& C, const Eigen::VectorXd& E);

ObserverGains synthesize_uio(const DiscreteModel& model);

/// One observer update. Returns (zeta_next, x_hat) where x_hat uses the
/// current measurement.
std::pair<Eigen::VectorXd, Eigen::VectorXd> observer_step(const ObserverGains& gains,
                                                          const Eigen::VectorXd& zeta,
                                                          const Eigen::VectorXd& y,
                                                          double xi_d);

}  // namespace platoon
