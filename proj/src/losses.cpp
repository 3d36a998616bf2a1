#include "robustmc/losses.hpp"

#include <cmath>

namespace robustmc {

LossSpec LossSpec::huber(double kappa) {
    if (kappa <= 0) throw ArgumentError("huber loss requires kappa > 0");
    return LossSpec{LossKind::huber, kappa};
}

const char* LossSpec::name() const {
    switch (kind) {
        case LossKind::huber: return "huber";
        case LossKind::absolute: return "absolute";
        case LossKind::quadratic: return "quadratic";
    }
    return "?";
}

double loss_value(const LossSpec& spec, double x) {
    switch (spec.kind) {
        case LossKind::huber: {
            const double a = std::abs(x);
            return a <= spec.kappa ? x * x : 2.0 * spec.kappa * a - spec.kappa * spec.kappa;
        }
        case LossKind::absolute: return std::abs(x);
        case LossKind::quadratic: return x * x;
    }
    return 0.0;
}

double loss_derivative(const LossSpec& spec, double x) {
    switch (spec.kind) {
        case LossKind::huber:
            if (std::abs(x) <= spec.kappa) return 2.0 * x;
            return x > 0 ? 2.0 * spec.kappa : -2.0 * spec.kappa;
        case LossKind::absolute:
            if (x == 0.0) return 0.0;
            return x > 0 ? 1.0 : -1.0;
        case LossKind::quadratic: return 2.0 * x;
    }
    return 0.0;
}

std::optional<double> lipschitz_constant(const LossSpec& spec) {
    switch (spec.kind) {
        case LossKind::huber: return 2.0 * spec.kappa;
        case LossKind::absolute: return 1.0;
        case LossKind::quadratic: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

void check_shapes(const ObservationSet& obs, const Matrix& b) {
    if (b.rows() != obs.p || b.cols() != obs.q)
        throw DimensionError("parameter matrix does not match observation dimensions");
    obs.validate();
}

}  // namespace

double empirical_risk(const LossSpec& spec, const ObservationSet& obs, const Matrix& b) {
    check_shapes(obs, b);
    if (obs.n() == 0) throw ArgumentError("empirical_risk: empty observation set");
    double sum = 0.0;
    for (const Entry& e : obs.entries) sum += loss_value(spec, e.value - b(e.row, e.col));
    return sum / obs.n();
}

Matrix risk_gradient(const LossSpec& spec, const ObservationSet& obs, const Matrix& b) {
    check_shapes(obs, b);
    if (obs.n() == 0) throw ArgumentError("risk_gradient: empty observation set");
    Matrix g = Matrix::Zero(obs.p, obs.q);
    for (const Entry& e : obs.entries)
        g(e.row, e.col) -= loss_derivative(spec, e.value - b(e.row, e.col));
    g /= obs.n();
    return g;
}

}  // namespace robustmc
