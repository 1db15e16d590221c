#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "platoon/observer.hpp"
#include "platoon/simulator.hpp"
#include "platoon/stochastic.hpp"

namespace platoon {

/// Parsed scenario file: everything needed to synthesize a controller and
/// run the scenario. Unknown JSON keys are rejected.
struct Scenario {
    VehicleParams params;
    double eps_weight = 0.1;
    double r_weight = 1.0;
    double gamma_hi = 100.0;
    double gamma_tol = 1e-3;
    double p_loss = 0.0;
    int n_vehicles = 14;
    std::uint64_t seed = 20260809;
    int horizon_steps = 6000;
    std::vector<std::pair<double, double>> leader_profile{{0.0, 0.0}, {10.0, 17.0}};
    ControllerMode mode = ControllerMode::Switching;
    double noise_amplitude = 0.0;
    int mc_runs = 1;
    std::string out_dir = ".";

    static Scenario from_json(const nlohmann::json& j);
    static Scenario from_file(const std::string& path);
    nlohmann::json to_json() const;

    /// Content hash of the synthesis-relevant subset (physical parameters,
    /// weights, bisection settings, loss probability). Gains bundles are tied
    /// to scenarios through this digest.
    std::string synthesis_digest() const;

    void validate() const;
};

/// Built-in scenario presets: fig2, fig4, fig5_switching, fig5_nonswitching,
/// fig6_switching, fig6_nonswitching.
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

/// Synthesized controller artifacts persisted as a JSON bundle.
struct GainsBundle {
    std::string config_digest;
    int order = 0;
    int d = 0;
    double gamma_star = 0.0;
    int iterations = 0;
    int solves = 0;
    double residual = 0.0;
    std::string method;
    double dc_gain = 0.0;
    double p_loss = 0.0;
    GainSet gains;
    ObserverGains observer;

    nlohmann::json to_json() const;
    static GainsBundle from_json(const nlohmann::json& j);
    static GainsBundle from_file(const std::string& path);
};

/// Full synthesis pipeline: discretize -> lift -> min_gamma -> dc_gain ->
/// f1_static_approx -> expectation_matching_gains -> synthesize_uio.
GainsBundle synthesize_bundle(const Scenario& scenario);

/// Builds the simulator configuration, refusing bundles whose digest does
/// not match the scenario (throws DigestMismatchError).
SimConfig make_sim_config(const Scenario& scenario, const GainsBundle& bundle);

}  // namespace platoon
