#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace ehctrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Switched linear plant: closed-loop dynamics on a received packet,
/// open-loop dynamics otherwise, plus the quadratic Lyapunov certificate
/// V(x) = x'Px that must shrink at rate `rho` in expectation.
class PlantModel {
public:
    /// Validates and builds a model. Throws ConfigError on dimension
    /// mismatch, non-symmetric or indefinite P, non-PSD noise covariance, or
    /// rho outside (0, 1).
    PlantModel(Matrix a_closed, Matrix a_open, Matrix noise_cov, Matrix lyapunov, double rho);

    /// Scalar convenience constructor.
    static PlantModel scalar(double a_open, double a_closed, double rho, double lyapunov = 1.0,
                             double noise_var = 1.0);

    [[nodiscard]] Eigen::Index dim() const noexcept { return a_closed_.rows(); }
    [[nodiscard]] const Matrix& a_closed() const noexcept { return a_closed_; }
    [[nodiscard]] const Matrix& a_open() const noexcept { return a_open_; }
    [[nodiscard]] const Matrix& noise_cov() const noexcept { return noise_cov_; }
    [[nodiscard]] const Matrix& lyapunov() const noexcept { return lyapunov_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }

    /// Factor L with L L' = noise_cov, for drawing w = L n with n ~ N(0, I).
    [[nodiscard]] const Matrix& noise_factor() const noexcept { return noise_factor_; }

private:
    Matrix a_closed_;
    Matrix a_open_;
    Matrix noise_cov_;
    Matrix lyapunov_;
    Matrix noise_factor_;
    double rho_;
};

struct PlantState {
    Vector x;
    std::uint64_t t = 0;
};

/// One slot of the switched dynamics. `noise` is supplied by the caller so
/// that randomness stays under the simulation's seeded streams.
/// Throws InvariantViolation on non-finite state or noise.
PlantState step_plant(const PlantModel& model, const PlantState& state, bool received,
                      const Vector& noise);

/// x' P x.
double lyapunov_value(const PlantModel& model, const Vector& x);
inline double lyapunov_value(const PlantModel& model, const PlantState& state) {
    return lyapunov_value(model, state.x);
}

/// Smallest eigenvalue of rho P - theta Ac'PAc - (1 - theta) Ao'PAo.
/// Non-negative iff reception probability `theta` meets the decrease rate.
double rate_margin(const PlantModel& model, double theta);

/// Minimal packet-reception probability under which E[V(x+)|x] <= rho V(x) + tr(PC).
///
/// Scalar plants use the closed form; matrix plants bisect on theta over
/// [0, 1], which is valid because rate_margin is concave in theta and
/// non-negative at theta = 1. The matrix result is within `tol` above the
/// true minimum.
///
/// Throws InfeasibleRateError when even theta = 1 misses the rate.
double required_reception_probability(const PlantModel& model, double tol = 1e-6);

/// Long-run ceiling tr(P C) / (1 - rho) on the average Lyapunov value.
double control_performance_bound(const PlantModel& model);

}  // namespace ehctrl
