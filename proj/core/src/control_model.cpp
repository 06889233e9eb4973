#include "ehctrl/control_model.hpp"

#include "ehctrl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace ehctrl {

namespace {

constexpr double kSymmetryTol = 1e-9;

double relative_asymmetry(const Matrix& m) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

void require_square(const Matrix& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
        throw ConfigError(std::string(name) + " must be " + std::to_string(n) + "x" +
                          std::to_string(n));
    }
    if (!m.allFinite()) throw ConfigError(std::string(name) + " has non-finite entries");
}

double min_eigenvalue(const Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

PlantModel::PlantModel(Matrix a_closed, Matrix a_open, Matrix noise_cov, Matrix lyapunov,
                       double rho)
    : a_closed_(std::move(a_closed)),
      a_open_(std::move(a_open)),
      noise_cov_(std::move(noise_cov)),
      lyapunov_(std::move(lyapunov)),
      rho_(rho) {
    const Eigen::Index n = a_closed_.rows();
    if (n < 1) throw ConfigError("plant dimension must be at least 1");
    require_square(a_closed_, n, "closed-loop matrix");
    require_square(a_open_, n, "open-loop matrix");
    require_square(noise_cov_, n, "noise covariance");
    require_square(lyapunov_, n, "Lyapunov matrix");
    if (!(rho_ > 0.0 && rho_ < 1.0)) throw ConfigError("decrease rate rho must lie in (0, 1)");

    if (relative_asymmetry(lyapunov_) > kSymmetryTol) {
        throw ConfigError("Lyapunov matrix P is not symmetric");
    }
    if (noise_cov_.cwiseAbs().maxCoeff() > 0.0 && relative_asymmetry(noise_cov_) > kSymmetryTol) {
        throw ConfigError("noise covariance is not symmetric");
    }
    lyapunov_ = 0.5 * (lyapunov_ + lyapunov_.transpose());
    noise_cov_ = 0.5 * (noise_cov_ + noise_cov_.transpose());

    if (min_eigenvalue(lyapunov_) <= 0.0) throw ConfigError("Lyapunov matrix P is not positive definite");

    Eigen::SelfAdjointEigenSolver<Matrix> cov(noise_cov_);
    const double scale = std::max(1.0, noise_cov_.cwiseAbs().maxCoeff());
    if (cov.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw ConfigError("noise covariance is not positive semidefinite");
    }
    noise_factor_ = cov.eigenvectors() *
                    cov.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

PlantModel PlantModel::scalar(double a_open, double a_closed, double rho, double lyapunov,
                              double noise_var) {
    return PlantModel(Matrix::Constant(1, 1, a_closed), Matrix::Constant(1, 1, a_open),
                      Matrix::Constant(1, 1, noise_var), Matrix::Constant(1, 1, lyapunov), rho);
}

PlantState step_plant(const PlantModel& model, const PlantState& state, bool received,
                      const Vector& noise) {
    if (state.x.size() != model.dim() || noise.size() != model.dim()) {
        throw InvariantViolation("plant state or noise has the wrong dimension", state.t);
    }
    if (!state.x.allFinite()) throw InvariantViolation("plant state is not finite", state.t);
    if (!noise.allFinite()) throw InvariantViolation("plant noise is not finite", state.t);

    const Matrix& a = received ? model.a_closed() : model.a_open();
    return PlantState{a * state.x + noise, state.t + 1};
}

double lyapunov_value(const PlantModel& model, const Vector& x) {
    return std::max(0.0, x.dot(model.lyapunov() * x));
}

double rate_margin(const PlantModel& model, double theta) {
    const Matrix& p = model.lyapunov();
    const Matrix closed = model.a_closed().transpose() * p * model.a_closed();
    const Matrix open = model.a_open().transpose() * p * model.a_open();
    const Matrix pencil = model.rho() * p - theta * closed - (1.0 - theta) * open;
    if (relative_asymmetry(pencil) > kSymmetryTol) {
        throw ConfigError("rate pencil lost symmetry beyond tolerance");
    }
    return min_eigenvalue(0.5 * (pencil + pencil.transpose()));
}

double required_reception_probability(const PlantModel& model, double tol) {
    if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be positive");

    if (model.dim() == 1) {
        const double open = model.a_open()(0, 0) * model.a_open()(0, 0);
        const double closed = model.a_closed()(0, 0) * model.a_closed()(0, 0);
        const double rho = model.rho();
        if (closed > rho) throw InfeasibleRateError("closed loop cannot meet decrease rate");
        if (open <= rho) return 0.0;
        // open > rho >= closed, so the denominator is positive
        return std::clamp((open - rho) / (open - closed), 0.0, 1.0);
    }

    const double feas_tol = 1e-12 * std::max(1.0, model.lyapunov().norm());
    if (rate_margin(model, 1.0) < -feas_tol) {
        throw InfeasibleRateError("closed loop cannot meet decrease rate");
    }
    if (rate_margin(model, 0.0) >= 0.0) return 0.0;

    double infeasible = 0.0;
    double feasible = 1.0;
    while (feasible - infeasible > tol) {
        const double mid = 0.5 * (infeasible + feasible);
        if (rate_margin(model, mid) >= 0.0) {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    return feasible;
}

double control_performance_bound(const PlantModel& model) {
    return (model.lyapunov() * model.noise_cov()).trace() / (1.0 - model.rho());
}

}  // namespace ehctrl
