#include "platoon/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace platoon {

StabilityReport l2_ratios(const SimRun& run, double eps_weight, double r_weight) {
    if (run.u.rows() < 2) throw std::invalid_argument("l2_ratios needs a horizon of at least 2");
    const int cols = static_cast<int>(run.u.cols());
    const double Ts = run.Ts;
    constexpr double kDenomFloor = 1e-12;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    StabilityReport rep;
    rep.l2_u.resize(cols);
    rep.ratio_u.assign(cols, nan);
    rep.ratio_z.assign(cols, nan);
    rep.peak_abs_e.resize(cols);

    std::vector<double> l2_z(cols);
    for (int i = 0; i < cols; ++i) {
        rep.l2_u[i] = std::sqrt(Ts * run.u.col(i).squaredNorm());
        l2_z[i] = std::sqrt(Ts * (eps_weight * eps_weight * run.e.col(i).squaredNorm() +
                                  r_weight * r_weight * run.u.col(i).squaredNorm()));
        rep.peak_abs_e[i] = run.e.col(i).cwiseAbs().maxCoeff();
    }
    for (int i = 1; i < cols; ++i) {
        if (rep.l2_u[i - 1] >= kDenomFloor) {
            rep.ratio_u[i] = rep.l2_u[i] / rep.l2_u[i - 1];
            rep.ratio_z[i] = l2_z[i] / rep.l2_u[i - 1];
        }
    }

    rep.max_ratio = nan;
    rep.string_stable = true;
    for (int i = rep.first_platoon_pair; i < cols; ++i) {
        if (std::isnan(rep.ratio_u[i])) continue;
        if (std::isnan(rep.max_ratio) || rep.ratio_u[i] > rep.max_ratio)
            rep.max_ratio = rep.ratio_u[i];
        if (rep.ratio_u[i] > 1.0 + rep.tol) rep.string_stable = false;
    }
    return rep;
}

}  // namespace platoon
