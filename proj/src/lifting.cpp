#include "platoon/lifting.hpp"

#include <stdexcept>

namespace platoon {

LiftedModel lift(const DiscreteModel& model, int d) {
    if (d < 1) throw std::invalid_argument("lift requires d >= 1; use the base model for d = 0");

    const int n = 3;
    const int N = n + 2 * d;
    LiftedModel lm;
    lm.N = N;
    lm.d = d;
    lm.eps_weight = model.eps_weight;
    lm.r_weight = model.r_weight;
    lm.Ts = model.Ts;

    lm.A = Eigen::MatrixXd::Zero(N, N);
    lm.B = Eigen::VectorXd::Zero(N);
    lm.E = Eigen::VectorXd::Zero(N);

    const int xi0 = n;           // xi(k-d)
    const int nu0 = n + d;       // nu(k-d)

    lm.A.topLeftCorner(n, n) = model.A;
    lm.A.col(xi0).head(n) = model.B;
    lm.A.col(nu0).head(n) = model.E;

    // Delay chains: each slot takes the next-newer one; the newest slot is
    // fed by the current input through B (own) or E (predecessor).
    for (int j = 0; j < d - 1; ++j) {
        lm.A(xi0 + j, xi0 + j + 1) = 1.0;
        lm.A(nu0 + j, nu0 + j + 1) = 1.0;
    }
    lm.B(xi0 + d - 1) = 1.0;
    lm.E(nu0 + d - 1) = 1.0;

    lm.C = Eigen::MatrixXd::Zero(2, N);
    lm.C.leftCols(n) = model.Cz;
    lm.R_perf = model.Dxi;
    return lm;
}

Eigen::VectorXd assemble_lifted_state(const Eigen::Vector3d& x_hat,
                                      const Eigen::VectorXd& xi_history,
                                      const Eigen::VectorXd& nu_history) {
    const auto d = xi_history.size();
    if (d < 1 || nu_history.size() != d)
        throw std::invalid_argument("xi/nu histories must both hold exactly d >= 1 entries");
    Eigen::VectorXd x_e(3 + 2 * d);
    x_e.head(3) = x_hat;
    x_e.segment(3, d) = xi_history;
    x_e.segment(3 + d, d) = nu_history;
    return x_e;
}

}  // namespace platoon
