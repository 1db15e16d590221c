#pragma once

#include <Eigen/Dense>

#include "platoon/synthesis.hpp"

namespace platoon {

/// Nominal plus switching gains tied together by the expectation identities
///   (1-p) F1 + p F2 = Fbar   and   (1-p) L = Lbar.
struct GainSet {
    Eigen::RowVectorXd Fbar;
    double Lbar = 0.0;
    Eigen::RowVectorXd F1;
    Eigen::RowVectorXd F2;
    double L = 0.0;
    double p = 0.0;        ///< loss probability the gains were designed for
    double dc_gain = 0.0;  ///< DC gain g of the nominal nu -> xi loop
};

/// Completes a switching gain set from the nominal design and a chosen F1 so
/// that the expected closed loop matches the nominal one. At p = 0 both
/// branches collapse to the nominal gains.
GainSet expectation_matching_gains(const NominalGains& nominal, const Eigen::RowVectorXd& F1,
                                   double p);

/// DC gain g = F (I - A - B F)^{-1} (E + B L) + L of the nominal closed loop.
double dc_gain(const NominalGains& nominal, const HinfPlant& plant);

/// Static approximation of the covariance-minimizing feedback:
///   F1 = (1 - p/(1-p) * Lbar * (1 - Lbar/g) / g) * Fbar.
Eigen::RowVectorXd f1_static_approx(const NominalGains& nominal, double g, double p);

/// Exact time-varying covariance-minimizing feedback
///   F1 = Fbar - p L E[nu] E[x]' (Cov + E[x]E[x]')^{-1},
/// regularized with a small ridge when the second moment is near singular.
Eigen::RowVectorXd f1_exact_timevarying(const NominalGains& nominal, double p,
                                        const Eigen::VectorXd& mean_x,
                                        const Eigen::MatrixXd& cov_x, double mean_nu);

/// First and second moments of the switched closed-loop state. nu is treated
/// as uncorrelated with the state around their means, which is the modeling
/// assumption behind f1_exact_timevarying.
struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// One step of the moment recursion for x+ = A x + B xi + E nu under the
/// switching law xi = delta (F1 x + L nu) + (1 - delta) F2 x with
/// delta ~ Bernoulli(1-p) independent of (x, nu).
Moments propagate_moments(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                          const Eigen::VectorXd& E, const GainSet& gains,
                          const Moments& state, double mean_nu, double var_nu);

}  // namespace platoon
