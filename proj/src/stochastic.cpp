#include "platoon/stochastic.hpp"

#include <stdexcept>

#include "platoon/errors.hpp"

namespace platoon {

GainSet expectation_matching_gains(const NominalGains& nominal, const Eigen::RowVectorXd& F1,
                                   double p) {
    if (!(p >= 0.0) || p >= 1.0)
        throw std::invalid_argument("loss probability must lie in [0, 1)");
    if (F1.size() != nominal.F.size())
        throw std::invalid_argument("F1 dimension does not match the nominal feedback");

    GainSet g;
    g.Fbar = nominal.F;
    g.Lbar = nominal.L;
    g.p = p;
    if (p == 0.0) {
        g.F1 = nominal.F;
        g.F2 = nominal.F;  // loss branch never taken
        g.L = nominal.L;
    } else {
        g.F1 = F1;
        g.F2 = (nominal.F - (1.0 - p) * F1) / p;
        g.L = nominal.L / (1.0 - p);
    }
    return g;
}

double dc_gain(const NominalGains& nominal, const HinfPlant& plant) {
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(plant.A.rows(), plant.A.cols()) - plant.A -
        plant.B * nominal.F;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw InfeasibleError("dc_gain: I - A - B F is singular (closed loop has a pole at z = 1)");
    return (nominal.F * lu.solve(plant.E + plant.B * nominal.L))(0) + nominal.L;
}

Eigen::RowVectorXd f1_static_approx(const NominalGains& nominal, double g, double p) {
    if (g == 0.0) throw std::invalid_argument("f1_static_approx requires a nonzero DC gain");
    if (!(p >= 0.0) || p >= 1.0)
        throw std::invalid_argument("loss probability must lie in [0, 1)");
    const double prefactor =
        1.0 - p / (1.0 - p) * nominal.L * (1.0 - nominal.L / g) / g;
    return prefactor * nominal.F;
}

Eigen::RowVectorXd f1_exact_timevarying(const NominalGains& nominal, double p,
                                        const Eigen::VectorXd& mean_x,
                                        const Eigen::MatrixXd& cov_x, double mean_nu) {
    if (!(p >= 0.0) || p >= 1.0)
        throw std::invalid_argument("loss probability must lie in [0, 1)");
    if (p == 0.0 || mean_nu == 0.0) return nominal.F;

    const double L = nominal.L / (1.0 - p);
    Eigen::MatrixXd second = cov_x + mean_x * mean_x.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(second);
    if (!lu.isInvertible()) {
        second.diagonal().array() += 1e-10 * second.trace();
        lu.compute(second);
        if (!lu.isInvertible())
            throw InfeasibleError("f1_exact_timevarying: singular second moment");
    }
    const Eigen::RowVectorXd correction =
        p * L * mean_nu * lu.solve(mean_x).transpose();
    return nominal.F - correction;
}

Moments propagate_moments(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                          const Eigen::VectorXd& E, const GainSet& gains,
                          const Moments& state, double mean_nu, double var_nu) {
    const double p = gains.p;
    const Eigen::MatrixXd Sxx = state.cov + state.mean * state.mean.transpose();
    const Eigen::VectorXd Sxn = state.mean * mean_nu;  // x and nu uncorrelated
    const double Snn = var_nu + mean_nu * mean_nu;

    const Eigen::MatrixXd Aa = A + B * gains.F1;       // arrival branch
    const Eigen::VectorXd Ea = E + B * gains.L;
    const Eigen::MatrixXd Ab = A + B * gains.F2;       // loss branch

    const Eigen::MatrixXd Ma = Aa * Sxx * Aa.transpose() + Aa * Sxn * Ea.transpose() +
                               Ea * Sxn.transpose() * Aa.transpose() + Ea * Snn * Ea.transpose();
    const Eigen::MatrixXd Mb = Ab * Sxx * Ab.transpose() + Ab * Sxn * E.transpose() +
                               E * Sxn.transpose() * Ab.transpose() + E * Snn * E.transpose();

    Moments next;
    next.mean = A * state.mean + B * (gains.Fbar * state.mean + gains.Lbar * mean_nu) +
                E * mean_nu;
    const Eigen::MatrixXd M = (1.0 - p) * Ma + p * Mb;
    next.cov = M - next.mean * next.mean.transpose();
    next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
    return next;
}

}  // namespace platoon
