#pragma once

#include <vector>

#include "platoon/simulator.hpp"
#include "platoon/state_space.hpp"

namespace platoon {

/// String-stability summary of one run. Per-pair ratios use the discrete L2
/// norm sqrt(Ts * sum u(k)^2) over the full logged horizon. A ratio is NaN
/// (reported absent) when its denominator is below 1e-12. The verdict is
/// taken over the controlled platoon pairs (index >= 2); the pair against
/// the virtual leader (index 1) is reported for information only.
struct StabilityReport {
    std::vector<double> l2_u;       ///< per column, including the leader
    std::vector<double> ratio_u;    ///< ratio_u[i] = ||u_i|| / ||u_{i-1}||, [0] unused
    std::vector<double> ratio_z;    ///< ratio_z[i] = ||z_i|| / ||u_{i-1}||
    std::vector<double> peak_abs_e; ///< per column
    double max_ratio = 0.0;         ///< over i >= first_platoon_pair
    bool string_stable = false;
    double tol = 1e-3;
    int first_platoon_pair = 2;
};

StabilityReport l2_ratios(const SimRun& run, double eps_weight, double r_weight);

}  // namespace platoon
