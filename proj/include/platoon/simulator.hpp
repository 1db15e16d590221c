#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "platoon/lifting.hpp"
#include "platoon/model.hpp"
#include "platoon/observer.hpp"
#include "platoon/stochastic.hpp"

namespace platoon {

enum class ControllerMode { Switching, NonSwitchingHold, OracleTimeVarying };

std::string to_string(ControllerMode mode);
ControllerMode controller_mode_from_string(const std::string& name);

/// Piecewise-linear speed schedule followed by the virtual leader's
/// reference trajectory. Knot times must be strictly increasing; the speed is
/// held constant before the first and after the last knot.
class LeaderProfile {
public:
    LeaderProfile() : LeaderProfile({{0.0, 0.0}, {10.0, 17.0}}) {}
    explicit LeaderProfile(std::vector<std::pair<double, double>> points);

    double speed(double t) const;
    double accel(double t) const;     ///< right-continuous segment slope
    double position(double t) const;  ///< integral of speed, position(0) = 0

    const std::vector<std::pair<double, double>>& points() const { return pts_; }

private:
    std::vector<std::pair<double, double>> pts_;
    std::vector<double> knot_pos_;
};

struct SimConfig {
    int n_vehicles = 14;  ///< controlled vehicles; the virtual leader is extra
    VehicleParams params;
    GainSet gains;        ///< lifted gains of dimension 3 + 2d
    ObserverGains observer;
    double p_loss = 0.0;
    std::uint64_t seed = 0;
    int horizon = 6000;
    LeaderProfile leader;
    ControllerMode mode = ControllerMode::Switching;
    double noise_amplitude = 0.0;  ///< relative measurement noise, [0, 0.05]
    int mc_runs = 1;

    void validate() const;
    std::string digest() const;  ///< content hash of everything above
};

/// Trajectory log. Column 0 is the virtual leader (a vehicle tracking the
/// speed profile with the nominal controller); columns 1..n_vehicles are the
/// controlled platoon. All series have `horizon` rows.
struct SimRun {
    double Ts = 0.0;
    int n_vehicles = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    Eigen::MatrixXd q, v, a, u;
    Eigen::MatrixXd e, edot, x3;  ///< true spacing-error state
    Eigen::MatrixXd xhat_e, xhat_edot, xhat_x3;
    Eigen::MatrixXd delta;  ///< arrival indicators; leader column is all ones
};

SimRun run_scenario(const SimConfig& config);

struct EnsembleSummary {
    int mc_runs = 0;
    std::uint64_t master_seed = 0;
    Eigen::MatrixXd mean_u, var_u, se_u;
    Eigen::MatrixXd mean_e, var_e;
    Eigen::VectorXd time_avg_var_u;  ///< per column
    double time_avg_var_u_total = 0.0;  ///< controlled vehicles only
    double time_avg_var_e_total = 0.0;
};

struct MonteCarloResult {
    EnsembleSummary summary;
    std::vector<Eigen::MatrixXd> run_u;  ///< populated when keep_runs
    std::vector<Eigen::MatrixXd> run_e;
};

/// Runs `mc_runs` independent replicates; run r is seeded with
/// derive_seed(config.seed, r). Replicates may execute in parallel (capped by
/// max_workers, or the PLATOON_MAX_WORKERS environment variable when
/// max_workers <= 0); statistics are reduced in run order, so the aggregate
/// is deterministic regardless of scheduling.
MonteCarloResult run_monte_carlo(const SimConfig& config, int mc_runs,
                                 bool keep_runs = false, int max_workers = 0);

}  // namespace platoon
