#include "platoon/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace platoon {

namespace {

int exact_delay_steps(double delay, double Ts, const char* name) {
    const double ratio = delay / Ts;
    const double rounded = std::round(ratio);
    if (delay < 0.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
        throw std::invalid_argument(std::string(name) +
                                    " must be a nonnegative integer multiple of Ts");
    }
    return static_cast<int>(rounded);
}

}  // namespace

int VehicleParams::input_delay_steps() const { return exact_delay_steps(phi, Ts, "phi"); }
int VehicleParams::tx_delay_steps() const { return exact_delay_steps(theta, Ts, "theta"); }
int VehicleParams::meas_delay_steps() const { return exact_delay_steps(psi, Ts, "psi"); }

void VehicleParams::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (!(Ts > 0.0)) throw std::invalid_argument("Ts must be positive");
    if (standstill_distance < 0.0)
        throw std::invalid_argument("standstill_distance must be nonnegative");
    input_delay_steps();
    tx_delay_steps();
    meas_delay_steps();
}

void continuous_error_matrices(const VehicleParams& params, Eigen::Matrix3d& Ac,
                               Eigen::Vector3d& Bc, Eigen::Vector3d& Ec) {
    params.validate();
    const double tau = params.tau;
    const double h = params.h;
    Ac << 0, 1, 0,
          0, 0, 1,
          0, 0, -1.0 / tau;
    Bc << 0, -h / tau, (h - tau) / (tau * tau);
    Ec << 0, 0, 1.0 / tau;
}

DiscreteModel discretize(const VehicleParams& params, double eps_weight, double r_weight) {
    params.validate();
    if (!(eps_weight > 0.0)) throw std::invalid_argument("eps_weight must be positive");
    if (!(r_weight > 0.0)) throw std::invalid_argument("r_weight must be positive");

    const double tau = params.tau;
    const double h = params.h;
    const double Ts = params.Ts;
    const double mu = std::exp(-Ts / tau);   // engine pole e^(-Ts/tau)
    const double w = 1.0 - mu;

    DiscreteModel m;
    m.Ts = Ts;
    m.A << 1, Ts, tau * Ts - tau * tau * w,
           0, 1, tau * w,
           0, 0, mu;
    m.B << -0.5 * Ts * Ts + Ts * (tau - h) - tau * (tau - h) * w,
           -Ts + (tau - h) * w,
           -(tau - h) / tau * w;
    m.E << 0.5 * Ts * Ts - Ts * tau + tau * tau * w,
           Ts - tau * w,
           w;
    m.C << 1, 0, 0,
           0, 1, 0;
    m.Cz << eps_weight, 0, 0,
            0, 0, 0;
    m.Dxi << 0, r_weight;
    m.eps_weight = eps_weight;
    m.r_weight = r_weight;
    return m;
}

Eigen::Matrix3d vehicle_state_matrix(const VehicleParams& params) {
    params.validate();
    const double tau = params.tau;
    const double Ts = params.Ts;
    const double w = 1.0 - std::exp(-Ts / tau);
    Eigen::Matrix3d A;
    A << 1, Ts, tau * Ts - tau * tau * w,
         0, 1, tau * w,
         0, 0, 1.0 - w;
    return A;
}

}  // namespace platoon
