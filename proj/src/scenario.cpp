#include "platoon/scenario.hpp"

#include <set>
#include <stdexcept>

#include "platoon/digest.hpp"
#include "platoon/errors.hpp"
#include "platoon/io.hpp"
#include "platoon/lifting.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw std::invalid_argument("unknown key \"" + key + "\" in " + where);
    }
}

double require_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(where + " requires numeric \"" + key + "\"");
    return j.at(key).get<double>();
}

Eigen::RowVectorXd row_from_json(const nlohmann::json& arr) {
    Eigen::RowVectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
    return v;
}

nlohmann::json row_to_json(const Eigen::RowVectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::MatrixXd mat_from_json(const nlohmann::json& rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr ? rows[0].size() : 0;
    Eigen::MatrixXd m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
        if (rows[i].size() != nc) throw std::invalid_argument("ragged matrix in bundle");
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"params", "weights", "synthesis", "p_loss", "n_vehicles", "seed",
                            "horizon_steps", "leader_profile", "controller_mode",
                            "noise_amplitude", "mc_runs", "out_dir"},
                        "scenario");
    Scenario s;

    const auto& pj = j.at("params");
    reject_unknown_keys(pj, {"tau", "h", "phi", "theta", "psi", "Ts", "standstill_distance"},
                        "scenario.params");
    s.params.tau = require_number(pj, "tau", "params");
    s.params.h = require_number(pj, "h", "params");
    s.params.phi = require_number(pj, "phi", "params");
    s.params.theta = require_number(pj, "theta", "params");
    s.params.psi = require_number(pj, "psi", "params");
    s.params.Ts = require_number(pj, "Ts", "params");
    s.params.standstill_distance =
        pj.contains("standstill_distance") ? pj.at("standstill_distance").get<double>() : 0.0;

    const auto& wj = j.at("weights");
    reject_unknown_keys(wj, {"eps", "r"}, "scenario.weights");
    s.eps_weight = require_number(wj, "eps", "weights");
    s.r_weight = require_number(wj, "r", "weights");

    if (j.contains("synthesis")) {
        const auto& sj = j.at("synthesis");
        reject_unknown_keys(sj, {"gamma_hi", "gamma_tol"}, "scenario.synthesis");
        if (sj.contains("gamma_hi")) s.gamma_hi = sj.at("gamma_hi").get<double>();
        if (sj.contains("gamma_tol")) s.gamma_tol = sj.at("gamma_tol").get<double>();
    }

    s.p_loss = require_number(j, "p_loss", "scenario");
    s.n_vehicles = j.at("n_vehicles").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.horizon_steps = j.at("horizon_steps").get<int>();

    const auto& lp = j.at("leader_profile");
    if (!lp.is_array() || lp.empty())
        throw std::invalid_argument("leader_profile must be a nonempty array of [t, v] pairs");
    s.leader_profile.clear();
    for (const auto& pt : lp) {
        if (!pt.is_array() || pt.size() != 2)
            throw std::invalid_argument("leader_profile entries must be [t, v] pairs");
        s.leader_profile.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }

    s.mode = controller_mode_from_string(j.at("controller_mode").get<std::string>());
    if (j.contains("noise_amplitude")) s.noise_amplitude = j.at("noise_amplitude").get<double>();
    if (j.contains("mc_runs")) s.mc_runs = j.at("mc_runs").get<int>();
    if (j.contains("out_dir")) s.out_dir = j.at("out_dir").get<std::string>();

    s.validate();
    return s;
}

Scenario Scenario::from_file(const std::string& path) {
    return from_json(read_json_file(path));
}

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["params"] = {{"tau", params.tau},       {"h", params.h},
                   {"phi", params.phi},       {"theta", params.theta},
                   {"psi", params.psi},       {"Ts", params.Ts},
                   {"standstill_distance", params.standstill_distance}};
    j["weights"] = {{"eps", eps_weight}, {"r", r_weight}};
    j["synthesis"] = {{"gamma_hi", gamma_hi}, {"gamma_tol", gamma_tol}};
    j["p_loss"] = p_loss;
    j["n_vehicles"] = n_vehicles;
    j["seed"] = seed;
    j["horizon_steps"] = horizon_steps;
    nlohmann::json lp = nlohmann::json::array();
    for (const auto& [t, v] : leader_profile) lp.push_back({t, v});
    j["leader_profile"] = lp;
    j["controller_mode"] = to_string(mode);
    j["noise_amplitude"] = noise_amplitude;
    j["mc_runs"] = mc_runs;
    j["out_dir"] = out_dir;
    return j;
}

void Scenario::validate() const {
    params.validate();
    if (!(eps_weight > 0.0) || !(r_weight > 0.0))
        throw std::invalid_argument("weights must be positive");
    if (!(gamma_hi > 0.0) || !(gamma_tol > 0.0))
        throw std::invalid_argument("synthesis settings must be positive");
    if (!(p_loss >= 0.0) || p_loss >= 1.0)
        throw std::invalid_argument("p_loss must lie in [0, 1)");
    if (n_vehicles < 1) throw std::invalid_argument("n_vehicles must be at least 1");
    if (horizon_steps < 1) throw std::invalid_argument("horizon_steps must be at least 1");
    if (noise_amplitude < 0.0 || noise_amplitude > 0.05)
        throw std::invalid_argument("noise_amplitude must lie in [0, 0.05]");
    if (mc_runs < 1) throw std::invalid_argument("mc_runs must be at least 1");
    LeaderProfile probe(leader_profile);  // validates knot ordering
}

std::string Scenario::synthesis_digest() const {
    Digest dg;
    dg.add("synthesis/1");
    dg.add(params.tau).add(params.h).add(params.phi).add(params.theta).add(params.psi);
    dg.add(params.Ts).add(params.standstill_distance);
    dg.add(eps_weight).add(r_weight).add(gamma_hi).add(gamma_tol).add(p_loss);
    return dg.hex();
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig4", "fig5_switching", "fig5_nonswitching", "fig6_switching",
            "fig6_nonswitching"};
}

Scenario preset_scenario(const std::string& name) {
    Scenario s;  // defaults already carry the paper parameters
    s.out_dir = "out_" + name;
    if (name == "fig2") {
        s.n_vehicles = 8;
        s.p_loss = 0.0;
        s.mode = ControllerMode::Switching;
    } else if (name == "fig4") {
        s.p_loss = 0.0;
        s.mode = ControllerMode::Switching;
    } else if (name == "fig5_switching") {
        s.p_loss = 0.8;
        s.mode = ControllerMode::Switching;
    } else if (name == "fig5_nonswitching") {
        s.p_loss = 0.8;
        s.mode = ControllerMode::NonSwitchingHold;
    } else if (name == "fig6_switching") {
        s.p_loss = 0.9;
        s.mode = ControllerMode::Switching;
    } else if (name == "fig6_nonswitching") {
        s.p_loss = 0.9;
        s.mode = ControllerMode::NonSwitchingHold;
    } else {
        throw std::invalid_argument("unknown preset \"" + name + "\"");
    }
    return s;
}

nlohmann::json GainsBundle::to_json() const {
    nlohmann::json j;
    j["schema"] = "platoon-gains/1";
    j["config_digest"] = config_digest;
    j["order"] = order;
    j["d"] = d;
    j["gamma_star"] = gamma_star;
    j["iterations"] = iterations;
    j["solves"] = solves;
    j["residual"] = residual;
    j["method"] = method;
    j["dc_gain"] = dc_gain;
    j["p_loss"] = p_loss;
    j["nominal"] = {{"F", row_to_json(gains.Fbar)}, {"L", gains.Lbar}};
    j["switching"] = {{"F1", row_to_json(gains.F1)},
                      {"F2", row_to_json(gains.F2)},
                      {"L", gains.L}};
    j["observer"] = {{"F", mat_to_json(observer.F)},   {"G", mat_to_json(observer.G)},
                     {"H", mat_to_json(observer.H)},   {"K1", mat_to_json(observer.K1)},
                     {"K2", mat_to_json(observer.K2)}, {"K", mat_to_json(observer.K)},
                     {"GB", row_to_json(observer.GB.transpose())}};
    return j;
}

GainsBundle GainsBundle::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "platoon-gains/1")
        throw std::invalid_argument("not a platoon-gains/1 bundle");
    GainsBundle b;
    b.config_digest = j.at("config_digest").get<std::string>();
    b.order = j.at("order").get<int>();
    b.d = j.at("d").get<int>();
    b.gamma_star = j.at("gamma_star").get<double>();
    b.iterations = j.at("iterations").get<int>();
    b.solves = j.at("solves").get<int>();
    b.residual = j.at("residual").get<double>();
    b.method = j.at("method").get<std::string>();
    b.dc_gain = j.at("dc_gain").get<double>();
    b.p_loss = j.at("p_loss").get<double>();
    b.gains.Fbar = row_from_json(j.at("nominal").at("F"));
    b.gains.Lbar = j.at("nominal").at("L").get<double>();
    b.gains.F1 = row_from_json(j.at("switching").at("F1"));
    b.gains.F2 = row_from_json(j.at("switching").at("F2"));
    b.gains.L = j.at("switching").at("L").get<double>();
    b.gains.p = b.p_loss;
    b.gains.dc_gain = b.dc_gain;
    const auto& oj = j.at("observer");
    b.observer.F = mat_from_json(oj.at("F"));
    b.observer.G = mat_from_json(oj.at("G"));
    b.observer.H = mat_from_json(oj.at("H"));
    b.observer.K1 = mat_from_json(oj.at("K1"));
    b.observer.K2 = mat_from_json(oj.at("K2"));
    b.observer.K = mat_from_json(oj.at("K"));
    b.observer.GB = row_from_json(oj.at("GB")).transpose();
    if (b.gains.Fbar.size() != b.order || b.gains.F1.size() != b.order ||
        b.gains.F2.size() != b.order)
        throw std::invalid_argument("bundle gain dimensions do not match the stated order");
    return b;
}

GainsBundle GainsBundle::from_file(const std::string& path) {
    return from_json(read_json_file(path));
}

GainsBundle synthesize_bundle(const Scenario& scenario) {
    scenario.validate();
    const DiscreteModel model =
        discretize(scenario.params, scenario.eps_weight, scenario.r_weight);
    const int d = scenario.params.input_delay_steps();
    if (d < 1)
        throw std::invalid_argument("synthesis requires phi >= Ts (at least one delay step)");
    const LiftedModel lifted = lift(model, d);
    const HinfPlant plant = hinf_plant(lifted);

    const GammaSearch search = min_gamma(plant, scenario.gamma_tol, scenario.gamma_hi);
    const double g = dc_gain(search.gains, plant);
    const Eigen::RowVectorXd F1 = f1_static_approx(search.gains, g, scenario.p_loss);

    GainsBundle b;
    b.config_digest = scenario.synthesis_digest();
    b.order = lifted.N;
    b.d = d;
    b.gamma_star = search.gamma_star;
    b.iterations = search.solution.iterations;
    b.solves = search.solves;
    b.residual = search.solution.residual;
    b.method = search.solution.method;
    b.dc_gain = g;
    b.p_loss = scenario.p_loss;
    b.gains = expectation_matching_gains(search.gains, F1, scenario.p_loss);
    b.gains.dc_gain = g;
    b.observer = synthesize_uio(model);
    return b;
}

SimConfig make_sim_config(const Scenario& scenario, const GainsBundle& bundle) {
    if (bundle.config_digest != scenario.synthesis_digest())
        throw DigestMismatchError("gains bundle digest " + bundle.config_digest +
                                  " does not match scenario digest " +
                                  scenario.synthesis_digest());
    SimConfig cfg;
    cfg.n_vehicles = scenario.n_vehicles;
    cfg.params = scenario.params;
    cfg.gains = bundle.gains;
    cfg.observer = bundle.observer;
    cfg.p_loss = scenario.p_loss;
    cfg.seed = scenario.seed;
    cfg.horizon = scenario.horizon_steps;
    cfg.leader = LeaderProfile(scenario.leader_profile);
    cfg.mode = scenario.mode;
    cfg.noise_amplitude = scenario.noise_amplitude;
    cfg.mc_runs = scenario.mc_runs;
    cfg.validate();
    return cfg;
}

}  // namespace platoon
