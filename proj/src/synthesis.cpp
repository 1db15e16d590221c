#include "platoon/synthesis.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "platoon/errors.hpp"
#include "platoon/state_space.hpp"

namespace platoon {

HinfPlant hinf_plant(const DiscreteModel& model) {
    HinfPlant p;
    p.A = model.A;
    p.B = model.B;
    p.E = model.E;
    p.C = model.Cz;
    p.D = model.Dxi;
    return p;
}

HinfPlant hinf_plant(const LiftedModel& model) {
    HinfPlant p;
    p.A = model.A;
    p.B = model.B;
    p.E = model.E;
    p.C = model.C;
    p.D = model.R_perf;
    return p;
}

std::vector<std::complex<double>> invariant_zeros(const HinfPlant& plant) {
    const Eigen::Index n = plant.A.rows();
    const Eigen::Index p = plant.C.rows();
    const double dtd = plant.D.squaredNorm();
    if (dtd <= 0.0) throw std::invalid_argument("invariant_zeros requires D of full column rank");

    // Output nulling with D full column rank: xi = -(D'D)^{-1} D'C x plus the
    // residual constraint N'C x = 0 with N spanning the left null space of D.
    const Eigen::RowVectorXd DtC = plant.D.transpose() * plant.C;
    const Eigen::MatrixXd A0 = plant.A - plant.B * (DtC / dtd);

    Eigen::MatrixXd W(0, n);
    if (p > 1) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(plant.D, Eigen::ComputeFullU);
        W = svd.matrixU().rightCols(p - 1).transpose() * plant.C;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(A0, /*computeEigenvectors=*/false);
    const double scale = A0.norm() + W.norm() + 1.0;

    std::vector<std::complex<double>> zeros;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> lam = es.eigenvalues()(i);
        if (W.rows() == 0) {
            zeros.push_back(lam);
            continue;
        }
        Eigen::MatrixXcd pencil(n + W.rows(), n);
        pencil.topRows(n) = A0.cast<std::complex<double>>();
        pencil.topRows(n).diagonal().array() -= lam;
        pencil.bottomRows(W.rows()) = W.cast<std::complex<double>>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
        if (svd.singularValues()(n - 1) < 1e-8 * scale) zeros.push_back(lam);
    }
    return zeros;
}

namespace {

struct ScaledPlant {
    const Eigen::MatrixXd& A;
    const Eigen::VectorXd& B;
    Eigen::VectorXd Eg;  // E / gamma
    const Eigen::MatrixXd& C;
    const Eigen::VectorXd& D;
    double d2;  // D'D
};

struct StepResult {
    Eigen::MatrixXd P;
    double V = 0.0;
    double Rhat = 0.0;  // level-one condition of the scaled problem
    bool ok = false;
    std::string why;
};

// One application of the Riccati operator of the scaled problem.
StepResult riccati_step(const ScaledPlant& sp, const Eigen::MatrixXd& P) {
    StepResult r;
    const Eigen::RowVectorXd BtP = sp.B.transpose() * P;
    const Eigen::RowVectorXd EtP = sp.Eg.transpose() * P;
    const double V = sp.d2 + BtP * sp.B;
    const double BtPE = BtP * sp.Eg;
    const double EtPE = EtP * sp.Eg;
    r.V = V;
    if (V <= 1e-9 * (1.0 + std::abs(V))) {
        r.why = "condition 1 failed: V = D'D + B'PB not positive definite";
        return r;
    }
    r.Rhat = 1.0 - EtPE + BtPE * BtPE / V;
    if (r.Rhat <= 1e-9 * (1.0 + std::abs(EtPE))) {
        r.why = "condition 2 failed: gamma^2 I - E'PE + E'PB V^-1 B'PE not positive definite";
        return r;
    }

    Eigen::Matrix2d G;
    G << V, BtPE,
         BtPE, EtPE - 1.0;
    Eigen::MatrixXd L(2, sp.A.cols());
    L.row(0) = BtP * sp.A + sp.D.transpose() * sp.C;
    L.row(1) = EtP * sp.A;

    r.P = sp.A.transpose() * P * sp.A + sp.C.transpose() * sp.C -
          L.transpose() * G.inverse() * L;
    r.P = 0.5 * (r.P + r.P.transpose()).eval();
    r.ok = true;
    return r;
}

double riccati_residual(const ScaledPlant& sp, const Eigen::MatrixXd& P) {
    const StepResult s = riccati_step(sp, P);
    if (!s.ok) return std::numeric_limits<double>::infinity();
    return (s.P - P).norm();
}

// Stable right deflating subspace of the extended pencil via LAPACK dgges.
// Pencil variables are [x; p; u] with u = [xi; nu_scaled].
bool solve_via_pencil(const ScaledPlant& sp, Eigen::MatrixXd& P_out, std::string& why) {
    const int n = static_cast<int>(sp.A.rows());
    const int m = 2;
    const int N = 2 * n + m;

    Eigen::MatrixXd Btil(n, m);
    Btil.col(0) = sp.B;
    Btil.col(1) = sp.Eg;
    Eigen::MatrixXd S(n, m);
    S.col(0) = sp.C.transpose() * sp.D;
    S.col(1).setZero();
    Eigen::Matrix2d Rtil;
    Rtil << sp.d2, 0.0,
            0.0, -1.0;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    M.topLeftCorner(n, n) = sp.A;
    M.topRightCorner(n, m) = Btil;
    M.block(n, 0, n, n) = -(sp.C.transpose() * sp.C);
    M.block(n, n, n, n).setIdentity();
    M.block(n, 2 * n, n, m) = -S;
    M.block(2 * n, 0, m, n) = S.transpose();
    M.bottomRightCorner(m, m) = Rtil;

    Eigen::MatrixXd Lm = Eigen::MatrixXd::Zero(N, N);
    Lm.topLeftCorner(n, n).setIdentity();
    Lm.block(n, n, n, n) = sp.A.transpose();
    Lm.block(2 * n, n, m, n) = -Btil.transpose();

    std::vector<double> alphar(N), alphai(N), beta(N);
    Eigen::MatrixXd vsr(N, N), vsl(1, 1);
    lapack_int sdim = 0;
    auto select_stable = [](const double* ar, const double* ai, const double* b) -> lapack_logical {
        return std::hypot(*ar, *ai) < std::abs(*b);
    };
    const lapack_int info = LAPACKE_dgges(
        LAPACK_COL_MAJOR, 'N', 'V', 'S',
        reinterpret_cast<LAPACK_D_SELECT3>(+select_stable), N, M.data(), N, Lm.data(), N,
        &sdim, alphar.data(), alphai.data(), beta.data(), vsl.data(), 1, vsr.data(), N);
    if (info != 0) {
        why = "pencil: dgges failed with info " + std::to_string(info);
        return false;
    }
    if (sdim != n) {
        why = "pencil: stable deflating subspace has dimension " + std::to_string(sdim) +
              ", expected " + std::to_string(n);
        return false;
    }

    const Eigen::MatrixXd X = vsr.block(0, 0, n, n);
    const Eigen::MatrixXd Y = vsr.block(n, 0, n, n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(X.transpose());
    if (!lu.isInvertible()) {
        why = "pencil: singular X block";
        return false;
    }
    Eigen::MatrixXd P = lu.solve(Y.transpose());
    P_out = 0.5 * (P + P.transpose()).eval();
    return true;
}

}  // namespace

HinfSolve solve_hinf_riccati(const HinfPlant& plant, double gamma,
                             const Eigen::MatrixXd& warm_start) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    for (const auto& z : invariant_zeros(plant)) {
        if (std::abs(std::abs(z) - 1.0) <= 1e-6)
            throw std::invalid_argument("plant has an invariant zero on the unit circle");
    }

    const Eigen::Index n = plant.A.rows();
    ScaledPlant sp{plant.A, plant.B, plant.E / gamma, plant.C, plant.D,
                   plant.D.squaredNorm()};

    constexpr int kMaxIter = 10000;
    constexpr double kStepTol = 1e-13;

    HinfSolve out;
    bool warm = warm_start.rows() == n && warm_start.cols() == n;
    for (int attempt = 0; attempt < (warm ? 2 : 1); ++attempt) {
        Eigen::MatrixXd P = (warm && attempt == 0) ? warm_start
                                                   : Eigen::MatrixXd::Zero(n, n);
        int iter = 0;
        bool converged = false;
        std::string fail;
        while (iter < kMaxIter) {
            const StepResult s = riccati_step(sp, P);
            ++iter;
            if (!s.ok) {
                fail = s.why;
                break;
            }
            const double delta = (s.P - P).norm();
            P = s.P;
            if (P.norm() > 1e14) {
                fail = "iteration diverged";
                break;
            }
            if (delta <= kStepTol * (1.0 + P.norm())) {
                converged = true;
                break;
            }
        }

        if (!fail.empty()) {
            if (warm && attempt == 0) continue;  // retry cold before declaring infeasible
            out.diagnostic = fail;
            return out;
        }

        std::string method = "iteration";
        if (!converged) {
            Eigen::MatrixXd Pp;
            std::string why;
            if (solve_via_pencil(sp, Pp, why)) {
                P = Pp;
                method = "pencil";
            } else {
                out.diagnostic = "iteration stalled after " + std::to_string(iter) +
                                 " steps; " + why;
                return out;
            }
        }

        const StepResult fin = riccati_step(sp, P);
        if (!fin.ok) {
            if (warm && attempt == 0) continue;
            out.diagnostic = fin.why;
            return out;
        }
        const double residual = (fin.P - P).norm();
        if (residual > 1e-8 * (1.0 + P.norm())) {
            out.diagnostic = "Riccati residual " + std::to_string(residual) +
                             " exceeds tolerance";
            return out;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
        if (es.eigenvalues()(0) < -1e-9 * std::max(1.0, P.norm())) {
            out.diagnostic = "P is not positive semidefinite";
            return out;
        }

        RiccatiSolution sol;
        sol.P = P;
        sol.V = fin.V;
        sol.Rcond = gamma * gamma * fin.Rhat;
        sol.gamma = gamma;
        sol.iterations = iter;
        sol.residual = residual;
        sol.method = method;
        out.solution = std::move(sol);
        out.diagnostic.clear();
        return out;
    }
    return out;
}

NominalGains synthesize_gains(const RiccatiSolution& sol, const HinfPlant& plant) {
    const Eigen::RowVectorXd BtP = plant.B.transpose() * sol.P;
    const double V = plant.D.squaredNorm() + BtP * plant.B;
    if (!(V > 0.0)) throw InfeasibleError("singular V in gain computation");

    NominalGains g;
    g.gamma = sol.gamma;
    g.F = -(BtP * plant.A + plant.D.transpose() * plant.C) / V;
    g.L = -(BtP * plant.E)(0) / V;

    const Eigen::MatrixXd Acl = plant.A + plant.B * g.F;
    if (spectral_radius(Acl) >= 1.0 - 1e-9)
        throw InfeasibleError("closed loop not Schur stable after gain synthesis");

    StateSpace cl{Acl, plant.E + plant.B * g.L,
                  plant.C + plant.D * g.F, plant.D * g.L};
    const double norm = closed_loop_norm(cl, 2048);
    if (norm > sol.gamma * (1.0 + 1e-6))
        throw InfeasibleError("frequency-grid certificate violated: norm " +
                              std::to_string(norm) + " > gamma " + std::to_string(sol.gamma));
    return g;
}

GammaSearch min_gamma(const HinfPlant& plant, double tol, double gamma_hi) {
    if (!(tol > 0.0) || !(gamma_hi > 0.0))
        throw std::invalid_argument("min_gamma requires positive tol and gamma_hi");

    GammaSearch result;
    HinfSolve top = solve_hinf_riccati(plant, gamma_hi);
    result.solves = 1;
    if (!top.feasible())
        throw InfeasibleError("infeasible at gamma_hi = " + std::to_string(gamma_hi) + ": " +
                              top.diagnostic);

    double lo = 0.0;
    double hi = gamma_hi;
    RiccatiSolution best = *top.solution;
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (hi + lo);
        HinfSolve s = solve_hinf_riccati(plant, mid, best.P);
        ++result.solves;
        if (s.feasible()) {
            hi = mid;
            best = *s.solution;
        } else {
            lo = mid;
        }
    }

    result.gamma_star = hi;
    result.solution = best;
    result.gains = synthesize_gains(best, plant);
    return result;
}

}  // namespace platoon
