#pragma once

#include <optional>

#include "robustmc/model.hpp"

namespace robustmc {

enum class LossKind { huber, absolute, quadratic };

/// Tagged loss choice. Huber uses the paper's scaling rho(x) = x^2 inside
/// the knot (not x^2/2), so kappa = 1.345 and the lambda formulas transfer
/// verbatim.
struct LossSpec {
    LossKind kind = LossKind::quadratic;
    double kappa = 0.0;

    static LossSpec huber(double kappa);
    static LossSpec absolute() { return LossSpec{LossKind::absolute, 0.0}; }
    static LossSpec quadratic() { return LossSpec{LossKind::quadratic, 0.0}; }

    const char* name() const;
};

// rho(x): Huber x^2 / 2*kappa*|x| - kappa^2, Absolute |x|, Quadratic x^2.
double loss_value(const LossSpec& spec, double x);

// d/dx rho(x). Absolute uses the minimum-norm subgradient 0 at x = 0.
double loss_derivative(const LossSpec& spec, double x);

// Global Lipschitz constant of rho: 2*kappa (Huber), 1 (Absolute).
// Quadratic is only locally Lipschitz, hence nullopt.
std::optional<double> lipschitz_constant(const LossSpec& spec);

// (1/n) sum_i rho(value_i - B[row_i, col_i]), summed in entry order.
double empirical_risk(const LossSpec& spec, const ObservationSet& obs, const Matrix& b);

// Dense gradient of the empirical risk: G[j,k] = -(1/n) sum over the
// observations at cell (j,k) of rho'(value - B[j,k]). Zero at unobserved
// cells; accumulation costs O(n), not O(pq).
Matrix risk_gradient(const LossSpec& spec, const ObservationSet& obs, const Matrix& b);

}  // namespace robustmc
