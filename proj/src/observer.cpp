#include "platoon/observer.hpp"

#include <Eigen/Eigenvalues>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon {

namespace {

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd O(C.rows() * n, n);
    Eigen::MatrixXd block = C;
    for (Eigen::Index i = 0; i < n; ++i) {
        O.middleRows(i * C.rows(), C.rows()) = block;
        block = block * A;
    }
    return O;
}

}  // namespace

ObserverGains synthesize_uio(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                             const Eigen::MatrixXd& C, const Eigen::VectorXd& E) {
    const Eigen::Index n = A.rows();
    const Eigen::Index q = C.rows();

    const Eigen::VectorXd CE = C * E;
    const double ce2 = CE.squaredNorm();
    if (ce2 <= 1e-18 * std::max(1.0, E.squaredNorm()))
        throw InfeasibleError("synthesize_uio: C E is rank deficient, no unknown-input decoupling");

    ObserverGains g;
    g.H = E * CE.transpose() / ce2;  // E [(CE)'CE]^{-1} (CE)'
    g.G = Eigen::MatrixXd::Identity(n, n) - g.H * C;
    const Eigen::MatrixXd Abar = g.G * A;  // A - H C A

    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(observability_matrix(Abar, C));
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 1e-9 * s(0))
            throw InfeasibleError("synthesize_uio: pair (A - HCA, C) is unobservable");
    }

    // Deadbeat placement of F = Abar - K1 C. Sweep deterministic output
    // combinations w, reduce to a single synthetic output w'C, and apply
    // Ackermann with desired polynomial lambda^n; the best-conditioned
    // observability matrix wins.
    std::vector<Eigen::VectorXd> candidates;
    for (Eigen::Index j = 0; j < q; ++j) candidates.push_back(Eigen::VectorXd::Unit(q, j));
    for (Eigen::Index i = 0; i < q; ++i)
        for (Eigen::Index j = i + 1; j < q; ++j) {
            candidates.push_back(Eigen::VectorXd::Unit(q, i) + Eigen::VectorXd::Unit(q, j));
            candidates.push_back(Eigen::VectorXd::Unit(q, i) - Eigen::VectorXd::Unit(q, j));
        }

    double best_cond = -1.0;
    Eigen::VectorXd best_w;
    Eigen::MatrixXd best_O;
    for (const auto& w : candidates) {
        const Eigen::RowVectorXd c = w.transpose() * C;
        const Eigen::MatrixXd O = observability_matrix(Abar, c);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(O);
        const double cond = svd.singularValues()(n - 1) / svd.singularValues()(0);
        if (cond > best_cond) {
            best_cond = cond;
            best_w = w;
            best_O = O;
        }
    }
    if (best_cond <= 1e-12)
        throw InfeasibleError("synthesize_uio: no output combination yields an observable pair");

    // Ackermann: k = Abar^n O^{-1} e_n, then K1 = k w'.
    Eigen::MatrixXd An = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) An = An * Abar;
    const Eigen::VectorXd k =
        An * best_O.fullPivLu().solve(Eigen::VectorXd::Unit(n, n - 1));
    g.K1 = k * best_w.transpose();

    g.F = Abar - g.K1 * C;
    g.K2 = g.F * g.H;
    g.K = g.K1 + g.K2;
    g.GB = g.G * B;
    return g;
}

ObserverGains synthesize_uio(const DiscreteModel& model) {
    return synthesize_uio(model.A, model.B, model.C, model.E);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> observer_step(const ObserverGains& gains,
                                                          const Eigen::VectorXd& zeta,
                                                          const Eigen::VectorXd& y,
                                                          double xi_d) {
    Eigen::VectorXd x_hat = zeta + gains.H * y;
    Eigen::VectorXd zeta_next = gains.F * zeta + gains.GB * xi_d + gains.K * y;
    return {std::move(zeta_next), std::move(x_hat)};
}

}  // namespace platoon
