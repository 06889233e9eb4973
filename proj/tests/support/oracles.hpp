#pragma once

#include "ehctrl/control_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ehctrl::testing {

/// Smallest eigenvalue of a symmetric 1x1 or 2x2 matrix, closed form.
inline double min_eig_small(const Matrix& m) {
    if (m.rows() == 1) return m(0, 0);
    const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
    return 0.5 * (a + d) - std::hypot(0.5 * (a - d), b);
}

/// Smallest theta on a uniform grid of the given step whose pencil is PSD.
/// Returns 2 when no grid point is feasible.
inline double theta_grid_oracle(const PlantModel& m, double step = 1e-4) {
    const Matrix& p = m.lyapunov();
    const Matrix c = m.a_closed().transpose() * p * m.a_closed();
    const Matrix o = m.a_open().transpose() * p * m.a_open();
    const auto n = static_cast<long>(std::llround(1.0 / step));
    for (long k = 0; k <= n; ++k) {
        const double th = static_cast<double>(k) * step;
        if (min_eig_small(m.rho() * p - th * c - (1.0 - th) * o) >= -1e-12) return th;
    }
    return 2.0;
}

/// Grid argmin over [lo, hi] with the given spacing.
template <typename F>
double grid_argmin(F&& f, double lo, double hi, double step = 1e-3) {
    double best = lo, best_val = f(lo);
    const auto n = static_cast<long>(std::llround((hi - lo) / step));
    for (long k = 1; k <= n; ++k) {
        const double v = std::min(hi, lo + static_cast<double>(k) * step);
        const double fv = f(v);
        if (fv < best_val) {
            best_val = fv;
            best = v;
        }
    }
    if (f(hi) < best_val) best = hi;
    return best;
}

/// Random 2x2 plant: closed loop meets the rate at theta = 1, open loop does not at theta = 0.
inline PlantModel random_matrix_plant(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Matrix l(2, 2);
        l << 1.0 + 0.5 * std::abs(u(rng)), 0.0, 0.4 * u(rng), 0.5 + 0.5 * std::abs(u(rng));
        const Matrix p = l * l.transpose();
        Matrix ac(2, 2), ao(2, 2);
        ac << 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng);
        ao << 1.0 + 0.2 * u(rng), 0.3 * u(rng), 0.2 * u(rng), 1.0 + 0.2 * u(rng);
        const double rho = 0.6 + 0.35 * std::abs(u(rng));
        PlantModel m(ac, ao, Matrix::Identity(2, 2), p, rho);
        const Matrix c = ac.transpose() * p * ac;
        const Matrix o = ao.transpose() * p * ao;
        if (min_eig_small(rho * p - c) > 1e-6 && min_eig_small(rho * p - o) < 0.0) return m;
    }
}

}  // namespace ehctrl::testing
