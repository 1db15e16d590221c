#include "platoon/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "platoon/digest.hpp"
#include "platoon/rng.hpp"

namespace platoon {

std::string to_string(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::Switching: return "switching";
        case ControllerMode::NonSwitchingHold: return "non_switching_hold";
        case ControllerMode::OracleTimeVarying: return "oracle_timevarying";
    }
    return "unknown";
}

ControllerMode controller_mode_from_string(const std::string& name) {
    if (name == "switching") return ControllerMode::Switching;
    if (name == "non_switching_hold") return ControllerMode::NonSwitchingHold;
    if (name == "oracle_timevarying") return ControllerMode::OracleTimeVarying;
    throw std::invalid_argument("unknown controller_mode: " + name);
}

LeaderProfile::LeaderProfile(std::vector<std::pair<double, double>> points)
    : pts_(std::move(points)) {
    if (pts_.empty()) throw std::invalid_argument("leader profile needs at least one point");
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        if (!(pts_[i].first > pts_[i - 1].first))
            throw std::invalid_argument("leader profile times must be strictly increasing");
    }
    // Cumulative positions at the knots, with position(0) = 0.
    knot_pos_.resize(pts_.size());
    knot_pos_[0] = pts_[0].second * pts_[0].first;  // constant speed before t0
    for (std::size_t i = 1; i < pts_.size(); ++i) {
        const double dt = pts_[i].first - pts_[i - 1].first;
        knot_pos_[i] = knot_pos_[i - 1] + 0.5 * (pts_[i].second + pts_[i - 1].second) * dt;
    }
}

double LeaderProfile::speed(double t) const {
    if (t <= pts_.front().first) return pts_.front().second;
    if (t >= pts_.back().first) return pts_.back().second;
    std::size_t i = 1;
    while (pts_[i].first < t) ++i;
    const double w = (t - pts_[i - 1].first) / (pts_[i].first - pts_[i - 1].first);
    return pts_[i - 1].second + w * (pts_[i].second - pts_[i - 1].second);
}

double LeaderProfile::accel(double t) const {
    if (t < pts_.front().first || t >= pts_.back().first) return 0.0;
    std::size_t i = 1;
    while (pts_[i].first <= t) ++i;
    return (pts_[i].second - pts_[i - 1].second) / (pts_[i].first - pts_[i - 1].first);
}

double LeaderProfile::position(double t) const {
    if (t <= pts_.front().first) return pts_.front().second * t;
    if (t >= pts_.back().first)
        return knot_pos_.back() + pts_.back().second * (t - pts_.back().first);
    std::size_t i = 1;
    while (pts_[i].first < t) ++i;
    const double dt = t - pts_[i - 1].first;
    const double slope = (pts_[i].second - pts_[i - 1].second) / (pts_[i].first - pts_[i - 1].first);
    return knot_pos_[i - 1] + pts_[i - 1].second * dt + 0.5 * slope * dt * dt;
}

void SimConfig::validate() const {
    params.validate();
    if (n_vehicles < 1) throw std::invalid_argument("n_vehicles must be at least 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (!(p_loss >= 0.0) || p_loss >= 1.0)
        throw std::invalid_argument("p_loss must lie in [0, 1)");
    if (noise_amplitude < 0.0 || noise_amplitude > 0.05)
        throw std::invalid_argument("noise_amplitude must lie in [0, 0.05]");
    if (mc_runs < 1) throw std::invalid_argument("mc_runs must be at least 1");
    const int d = params.input_delay_steps();
    if (d < 1) throw std::invalid_argument("the lifted controller requires phi >= Ts");
    if (gains.Fbar.size() != 3 + 2 * d)
        throw std::invalid_argument("gain dimension does not match 3 + 2*phi/Ts");
    if (gains.F1.size() != gains.Fbar.size() || gains.F2.size() != gains.Fbar.size())
        throw std::invalid_argument("switching gain dimensions are inconsistent");
    if (std::abs(gains.p - p_loss) > 1e-12)
        throw std::invalid_argument("gains were designed for a different loss probability");
    if (observer.F.rows() != 3 || observer.F.cols() != 3 || observer.H.rows() != 3 ||
        observer.H.cols() != 2)
        throw std::invalid_argument("observer gains must be for the order-3 model");
}

std::string SimConfig::digest() const {
    Digest dg;
    dg.add("simconfig/1");
    dg.add(n_vehicles).add(horizon).add(static_cast<std::uint64_t>(seed));
    dg.add(params.tau).add(params.h).add(params.phi).add(params.theta).add(params.psi);
    dg.add(params.Ts).add(params.standstill_distance);
    dg.add(p_loss).add(noise_amplitude).add(mc_runs).add(to_string(mode));
    for (const auto& [t, v] : leader.points()) dg.add(t).add(v);
    auto add_row = [&dg](const Eigen::RowVectorXd& r) {
        for (Eigen::Index i = 0; i < r.size(); ++i) dg.add(r(i));
    };
    add_row(gains.Fbar);
    add_row(gains.F1);
    add_row(gains.F2);
    dg.add(gains.Lbar).add(gains.L).add(gains.p).add(gains.dc_gain);
    auto add_mat = [&dg](const Eigen::MatrixXd& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) dg.add(m(i, j));
    };
    add_mat(observer.F);
    add_mat(observer.H);
    add_mat(observer.K);
    return dg.hex();
}

namespace {

struct PlantMatrices {
    Eigen::Matrix3d Av;       // physical [q, v, a] state matrix
    Eigen::Vector3d Ev;       // physical input matrix (equals error-model E)
    LiftedModel lifted;       // for the oracle moment recursion
};

// True spacing-error state of column i at step k, from the physical logs.
// pred_* are the predecessor's position/speed/acceleration at step k.
Eigen::Vector3d error_state(double pred_q, double pred_v, double pred_a, double qi, double vi,
                            double ai, const VehicleParams& pr) {
    Eigen::Vector3d x;
    x(0) = pred_q - qi - pr.h * vi - pr.standstill_distance;
    x(1) = pred_v - vi - pr.h * ai;
    x(2) = pred_a - (1.0 - pr.h / pr.tau) * ai;
    return x;
}

struct OracleGains {
    // Per controlled vehicle: lifted-state mean trajectory and held-input
    // mean from the nominal (lossless) pass, consumed step by step.
    std::vector<Eigen::MatrixXd> xe_nominal;  // horizon x N
    Eigen::MatrixXd nu_nominal;               // horizon x (n+1)
};

SimRun simulate(const SimConfig& cfg, const PlantMatrices& pm, const OracleGains* oracle);

OracleGains build_oracle_reference(const SimConfig& cfg, const PlantMatrices& pm) {
    SimConfig nominal = cfg;
    nominal.p_loss = 0.0;
    nominal.mode = ControllerMode::NonSwitchingHold;
    nominal.noise_amplitude = 0.0;
    nominal.gains = expectation_matching_gains({cfg.gains.Fbar, cfg.gains.Lbar, 0.0},
                                               cfg.gains.Fbar, 0.0);
    nominal.gains.dc_gain = cfg.gains.dc_gain;
    SimRun run = simulate(nominal, pm, nullptr);

    const int d = cfg.params.input_delay_steps();
    const int r = cfg.params.tx_delay_steps();
    const int N = 3 + 2 * d;
    OracleGains og;
    og.nu_nominal = Eigen::MatrixXd::Zero(cfg.horizon, cfg.n_vehicles + 1);
    og.xe_nominal.assign(cfg.n_vehicles + 1, Eigen::MatrixXd::Zero(cfg.horizon, N));
    for (int i = 1; i <= cfg.n_vehicles; ++i) {
        for (int k = 0; k < cfg.horizon; ++k) {
            og.nu_nominal(k, i) = (k - r >= 0) ? run.u(k - r, i - 1) : 0.0;
            Eigen::VectorXd xe(N);
            xe << run.xhat_e(k, i), run.xhat_edot(k, i), run.xhat_x3(k, i),
                Eigen::VectorXd::Zero(N - 3);
            for (int j = 0; j < d; ++j) {
                const int kk = k - d + j;
                xe(3 + j) = (kk >= 0) ? run.u(kk, i) : 0.0;
                const int kr = kk - r;
                xe(3 + d + j) = (kr >= 0) ? run.u(kr, i - 1) : 0.0;
            }
            og.xe_nominal[i].row(k) = xe.transpose();
        }
    }
    return og;
}

SimRun simulate(const SimConfig& cfg, const PlantMatrices& pm, const OracleGains* oracle) {
    const VehicleParams& pr = cfg.params;
    const int d = pr.input_delay_steps();
    const int m = pr.meas_delay_steps();
    const int r = pr.tx_delay_steps();
    const int n = cfg.n_vehicles;
    const int cols = n + 1;
    const int T = cfg.horizon;
    const int N = 3 + 2 * d;
    const double p = cfg.p_loss;

    SimRun out;
    out.Ts = pr.Ts;
    out.n_vehicles = n;
    out.seed = cfg.seed;
    out.config_digest = cfg.digest();
    for (Eigen::MatrixXd* mat : {&out.q, &out.v, &out.a, &out.u, &out.e, &out.edot, &out.x3,
                                 &out.xhat_e, &out.xhat_edot, &out.xhat_x3, &out.delta})
        mat->setZero(T, cols);

    // Physical state per column and per-vehicle controller state.
    Eigen::MatrixXd phys = Eigen::MatrixXd::Zero(3, cols);  // rows q, v, a
    for (int i = 0; i < cols; ++i) phys(0, i) = -(i + 1) * pr.standstill_distance;

    std::vector<Eigen::Vector3d> zeta(cols, Eigen::Vector3d::Zero());
    std::vector<double> hold(cols, 0.0);
    std::vector<std::mt19937_64> loss_rng, noise_rng;
    for (int i = 0; i < cols; ++i) {
        loss_rng.emplace_back(derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i)));
        noise_rng.emplace_back(derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 1));
    }

    // Controller-side view of the predecessor input (received or held).
    Eigen::MatrixXd nu_hat = Eigen::MatrixXd::Zero(T, cols);

    // Oracle-mode covariance recursion state.
    std::vector<Moments> oracle_moments(cols);
    if (oracle) {
        for (int i = 1; i < cols; ++i) {
            oracle_moments[i].mean = Eigen::VectorXd::Zero(N);
            oracle_moments[i].cov = Eigen::MatrixXd::Zero(N, N);
        }
    }
    const NominalGains nominal{cfg.gains.Fbar, cfg.gains.Lbar, 0.0};

    Eigen::VectorXd xe(N);
    for (int k = 0; k < T; ++k) {
        const double t = k * pr.Ts;
        out.q.row(k) = phys.row(0);
        out.v.row(k) = phys.row(1);
        out.a.row(k) = phys.row(2);

        const double q_ref = cfg.leader.position(t);
        const double v_ref = cfg.leader.speed(t);
        const double a_ref = cfg.leader.accel(t);

        for (int i = 0; i < cols; ++i) {
            const Eigen::Vector3d x_true =
                (i == 0) ? error_state(q_ref, v_ref, a_ref, phys(0, 0), phys(1, 0), phys(2, 0), pr)
                         : error_state(phys(0, i - 1), phys(1, i - 1), phys(2, i - 1), phys(0, i),
                                       phys(1, i), phys(2, i), pr);
            out.e(k, i) = x_true(0);
            out.edot(k, i) = x_true(1);
            out.x3(k, i) = x_true(2);

            if (i == 0) {
                // The virtual leader tracks the reference with the nominal
                // law, perfect state knowledge and no incoming channel.
                out.delta(k, 0) = 1.0;
                xe.head(3) = x_true;
                for (int j = 0; j < d; ++j) {
                    const int kk = k - d + j;
                    xe(3 + j) = (kk >= 0) ? out.u(kk, 0) : 0.0;
                    xe(3 + d + j) = 0.0;
                }
                out.u(k, 0) = cfg.gains.Fbar * xe;
                out.xhat_e(k, 0) = x_true(0);
                out.xhat_edot(k, 0) = x_true(1);
                out.xhat_x3(k, 0) = x_true(2);
                continue;
            }

            const bool delivered = p == 0.0 || u01(loss_rng[i]) < 1.0 - p;
            out.delta(k, i) = delivered ? 1.0 : 0.0;
            if (delivered) hold[i] = (k - r >= 0) ? out.u(k - r, i - 1) : 0.0;
            nu_hat(k, i) = hold[i];

            // Measurement of the m-steps-old error state, optionally with
            // multiplicative uniform noise.
            const int km = k - m;
            Eigen::Vector2d y = Eigen::Vector2d::Zero();
            if (km >= 0) y << out.e(km, i), out.edot(km, i);
            if (cfg.noise_amplitude > 0.0) {
                y(0) *= 1.0 + cfg.noise_amplitude * (2.0 * u01(noise_rng[i]) - 1.0);
                y(1) *= 1.0 + cfg.noise_amplitude * (2.0 * u01(noise_rng[i]) - 1.0);
            }

            const Eigen::Vector3d x_hat = zeta[i] + cfg.observer.H * y;
            out.xhat_e(k, i) = x_hat(0);
            out.xhat_edot(k, i) = x_hat(1);
            out.xhat_x3(k, i) = x_hat(2);

            xe.head(3) = x_hat;
            for (int j = 0; j < d; ++j) {
                const int kk = k - d + j;
                xe(3 + j) = (kk >= 0) ? out.u(kk, i) : 0.0;
                xe(3 + d + j) = (kk >= 0) ? nu_hat(kk, i) : 0.0;
            }

            double u_i = 0.0;
            switch (cfg.mode) {
                case ControllerMode::Switching:
                    u_i = delivered ? (cfg.gains.F1 * xe)(0) + cfg.gains.L * hold[i]
                                    : (cfg.gains.F2 * xe)(0);
                    break;
                case ControllerMode::NonSwitchingHold:
                    u_i = (cfg.gains.Fbar * xe)(0) + cfg.gains.Lbar * hold[i];
                    break;
                case ControllerMode::OracleTimeVarying: {
                    Moments& mom = oracle_moments[i];
                    mom.mean = oracle->xe_nominal[i].row(k).transpose();
                    const double mean_nu = oracle->nu_nominal(k, i);
                    const Eigen::RowVectorXd F1 =
                        f1_exact_timevarying(nominal, p, mom.mean, mom.cov, mean_nu);
                    const GainSet step_gains = [&] {
                        GainSet gs = expectation_matching_gains(nominal, F1, p);
                        return gs;
                    }();
                    u_i = delivered ? (step_gains.F1 * xe)(0) + step_gains.L * hold[i]
                                    : (step_gains.F2 * xe)(0);
                    mom = propagate_moments(pm.lifted.A, pm.lifted.B, pm.lifted.E, step_gains,
                                            mom, mean_nu, 0.0);
                    break;
                }
            }
            out.u(k, i) = u_i;

            // Observer advance with the vehicle's own delayed input.
            const int kd = k - d - m;
            const double xi_d = (kd >= 0) ? out.u(kd, i) : 0.0;
            zeta[i] = cfg.observer.F * zeta[i] + cfg.observer.GB * xi_d + cfg.observer.K * y;
        }

        // Advance the physical states with the exact ZOH step.
        for (int i = 0; i < cols; ++i) {
            const int kd = k - d;
            const double u_delayed = (kd >= 0) ? out.u(kd, i) : 0.0;
            phys.col(i) = pm.Av * phys.col(i) + pm.Ev * u_delayed;
        }
    }
    return out;
}

PlantMatrices build_plant(const SimConfig& cfg) {
    PlantMatrices pm;
    pm.Av = vehicle_state_matrix(cfg.params);
    const DiscreteModel dm = discretize(cfg.params, 1.0, 1.0);
    pm.Ev = dm.E;
    pm.lifted = lift(dm, cfg.params.input_delay_steps());
    return pm;
}

}  // namespace

SimRun run_scenario(const SimConfig& config) {
    config.validate();
    const PlantMatrices pm = build_plant(config);
    if (config.mode == ControllerMode::OracleTimeVarying) {
        const OracleGains oracle = build_oracle_reference(config, pm);
        return simulate(config, pm, &oracle);
    }
    return simulate(config, pm, nullptr);
}

MonteCarloResult run_monte_carlo(const SimConfig& config, int mc_runs, bool keep_runs,
                                 int max_workers) {
    if (mc_runs < 2) throw std::invalid_argument("run_monte_carlo requires mc_runs >= 2");
    config.validate();

    if (max_workers <= 0) {
        max_workers = static_cast<int>(std::thread::hardware_concurrency());
        if (const char* env = std::getenv("PLATOON_MAX_WORKERS")) {
            const int parsed = std::atoi(env);
            if (parsed > 0) max_workers = parsed;
        }
        if (max_workers < 1) max_workers = 1;
    }

    std::vector<Eigen::MatrixXd> run_u(mc_runs), run_e(mc_runs);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < mc_runs; r = next.fetch_add(1)) {
            SimConfig c = config;
            c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
            SimRun run = run_scenario(c);
            run_u[r] = std::move(run.u);
            run_e[r] = std::move(run.e);
        }
    };
    const int workers = std::max(1, std::min(max_workers, mc_runs));
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const int T = config.horizon;
    const int cols = config.n_vehicles + 1;
    MonteCarloResult out;
    EnsembleSummary& s = out.summary;
    s.mc_runs = mc_runs;
    s.master_seed = config.seed;
    s.mean_u.setZero(T, cols);
    s.mean_e.setZero(T, cols);
    for (int r = 0; r < mc_runs; ++r) {
        s.mean_u += run_u[r];
        s.mean_e += run_e[r];
    }
    s.mean_u /= mc_runs;
    s.mean_e /= mc_runs;
    s.var_u.setZero(T, cols);
    s.var_e.setZero(T, cols);
    for (int r = 0; r < mc_runs; ++r) {
        s.var_u += (run_u[r] - s.mean_u).cwiseAbs2();
        s.var_e += (run_e[r] - s.mean_e).cwiseAbs2();
    }
    s.var_u /= (mc_runs - 1);
    s.var_e /= (mc_runs - 1);
    s.se_u = (s.var_u / mc_runs).cwiseSqrt();
    s.time_avg_var_u = s.var_u.colwise().mean();
    s.time_avg_var_u_total = s.time_avg_var_u.tail(config.n_vehicles).mean();
    s.time_avg_var_e_total = s.var_e.rightCols(config.n_vehicles).mean();

    if (keep_runs) {
        out.run_u = std::move(run_u);
        out.run_e = std::move(run_e);
    }
    return out;
}

}  // namespace platoon
