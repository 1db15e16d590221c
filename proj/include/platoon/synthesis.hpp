#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "platoon/lifting.hpp"
#include "platoon/model.hpp"

namespace platoon {

/// Single-input, single-disturbance synthesis plant
///   x(k+1) = A x + B xi + E nu,   z = C x + D xi.
struct HinfPlant {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::VectorXd E;
    Eigen::MatrixXd C;
    Eigen::VectorXd D;
};

HinfPlant hinf_plant(const DiscreteModel& model);
HinfPlant hinf_plant(const LiftedModel& model);

/// Invariant zeros of (A, B, C, D) for D of full column rank.
std::vector<std::complex<double>> invariant_zeros(const HinfPlant& plant);

/// Stabilizing solution of the H-infinity Riccati equation at a given
/// attenuation level. P belongs to the gamma-scaled problem (E replaced by
/// E/gamma), so the level-gamma conditions read V > 0 and Rcond > 0 with
/// Rcond = gamma^2 - E'PE + E'PB V^{-1} B'PE.
struct RiccatiSolution {
    Eigen::MatrixXd P;
    double V = 0.0;
    double Rcond = 0.0;
    double gamma = 0.0;
    int iterations = 0;
    double residual = 0.0;
    std::string method;  ///< "iteration" or "pencil"
};

/// Outcome of one Riccati solve: either a solution or a diagnostic naming
/// the failed feasibility condition.
struct HinfSolve {
    std::optional<RiccatiSolution> solution;
    std::string diagnostic;
    bool feasible() const { return solution.has_value(); }
};

/// State-feedback/feedforward pair xi = F x + L nu with a certified
/// closed-loop bound ||T_{nu->z}|| <= gamma.
struct NominalGains {
    Eigen::RowVectorXd F;
    double L = 0.0;
    double gamma = 0.0;
};

/// Solves the level-gamma Riccati equation by fixed-point iteration from
/// P = 0 (optionally warm-started), falling back to an ordered generalized
/// Schur decomposition of the extended pencil when the iteration stalls.
/// Throws std::invalid_argument if the plant has an invariant zero on the
/// unit circle (within 1e-6) or gamma <= 0.
HinfSolve solve_hinf_riccati(const HinfPlant& plant, double gamma,
                             const Eigen::MatrixXd& warm_start = Eigen::MatrixXd());

/// Gains from a feasible solution. Verifies Schur stability of A + B F and
/// the frequency-grid certificate; throws InfeasibleError if either fails.
NominalGains synthesize_gains(const RiccatiSolution& sol, const HinfPlant& plant);

struct GammaSearch {
    double gamma_star = 0.0;
    NominalGains gains;
    RiccatiSolution solution;
    int solves = 0;
};

/// Bisects the attenuation level down to relative width `tol`, returning the
/// smallest certified gamma and its gains. Throws InfeasibleError when even
/// gamma_hi is infeasible.
GammaSearch min_gamma(const HinfPlant& plant, double tol = 1e-3, double gamma_hi = 100.0);

}  // namespace platoon
