#include "robustmc/solver.hpp"

#include <cmath>

namespace robustmc {

namespace {

void check_config(const SolverConfig& cfg) {
    if (cfg.lambda < 0) throw ArgumentError("solver: lambda must be nonnegative");
    if (cfg.l_init <= 0) throw ArgumentError("solver: l_init must be positive");
    if (cfg.beta <= 1) throw ArgumentError("solver: beta must exceed 1");
    if (cfg.max_iter < 1) throw ArgumentError("solver: max_iter must be positive");
    if (cfg.fixed_point_tol < 0) throw ArgumentError("solver: fixed_point_tol must be nonnegative");
    if (cfg.box_projection && cfg.eta <= 0)
        throw ArgumentError("solver: box projection requires eta > 0");
}

// Nuclear prox that also reports ||result||_nuclear (free from the
// thresholded singular values, except when the box projection changes them).
Matrix prox_step(const Matrix& w, double gamma, bool box, double eta, double& nuclear_out) {
    if (gamma == 0.0 && !box) {
        nuclear_out = 0.0;  // unused: lambda == 0 contributes nothing to the objective
        return w;
    }
    Matrix b;
    if (gamma == 0.0) {
        b = w;
        nuclear_out = 0.0;
    } else {
        SvdFactors f = svd_thin(w);
        Vector s = f.singular_values;
        double nn = 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            s(i) = soft_threshold(s(i), gamma);
            nn += s(i);
        }
        b = f.u * s.asDiagonal() * f.vt;
        nuclear_out = nn;
    }
    if (box) {
        b = project_box(b, eta);
        if (gamma != 0.0) {
            nuclear_out = svd_thin(b).singular_values.sum();
        }
    }
    return b;
}

double nuclear_norm_of(const Matrix& a) { return svd_thin(a).singular_values.sum(); }

}  // namespace

double fixed_point_residual(const LossSpec& spec, const ObservationSet& obs, const Matrix& b,
                            double lambda, double curvature) {
    if (curvature <= 0) throw ArgumentError("fixed_point_residual: curvature must be positive");
    const Matrix g = risk_gradient(spec, obs, b);
    const Matrix step = prox_nuclear(b - g / curvature, lambda / curvature);
    return (b - step).norm();
}

SolveResult solve(const LossSpec& spec, const ObservationSet& obs, const SolverConfig& cfg,
                  const std::optional<Matrix>& init) {
    if (spec.kind == LossKind::absolute)
        throw ArgumentError("solve requires a differentiable loss; use solve_absolute");
    check_config(cfg);
    obs.validate();

    Matrix b = init ? *init : Matrix::Zero(obs.p, obs.q);
    if (b.rows() != obs.p || b.cols() != obs.q)
        throw DimensionError("solve: init does not match observation dimensions");

    Matrix v = b;
    double curvature = cfg.l_init;
    const double lambda = cfg.lambda;

    double obj = empirical_risk(spec, obs, b) +
                 (lambda > 0 ? lambda * nuclear_norm_of(b) : 0.0);
    if (!std::isfinite(obj)) throw NumericError("solve: non-finite objective", 0);

    SolveResult res;
    res.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
    res.accepted_deltas.reserve(static_cast<std::size_t>(cfg.max_iter));

    double accepted_curvature = curvature;
    bool early_stop = false;
    double early_residual = 0.0;

    for (int t = 1; t <= cfg.max_iter; ++t) {
        const Matrix b_prev = b;
        const double obj_prev = obj;
        const Matrix grad_prev = risk_gradient(spec, obs, b_prev);
        const Matrix grad_v = risk_gradient(spec, obs, v);

        double delta = 0.0;
        double obj_cand = 0.0;
        Matrix b_cand;
        while (true) {
            double nuclear_cand = 0.0;
            b_cand = prox_step(v - grad_v / curvature, lambda / curvature, cfg.box_projection,
                               cfg.eta, nuclear_cand);
            obj_cand = empirical_risk(spec, obs, b_cand) + lambda * nuclear_cand;
            if (!std::isfinite(obj_cand)) throw NumericError("solve: non-finite objective", t);
            const Matrix diff = b_cand - b_prev;
            delta = obj_cand - obj_prev - grad_prev.cwiseProduct(diff).sum() -
                    0.5 * curvature * diff.squaredNorm();
            if (delta <= cfg.bt_tolerance) break;
            curvature *= cfg.beta;
            if (curvature > 1e18) throw NumericError("solve: backtracking diverged", t);
        }
        // The pseudocode's trailing L <- L/beta cancels the loop's final
        // multiplication, so the accepted curvature carries over as is.
        accepted_curvature = curvature;

        v = b_cand + (static_cast<double>(t) / (t + 3)) * (b_cand - b_prev);
        b = std::move(b_cand);
        obj = obj_cand;
        res.objective_trace.push_back(obj);
        res.accepted_deltas.push_back(delta);
        res.iterations_run = t;

        if (cfg.fixed_point_tol > 0) {
            const double r = fixed_point_residual(spec, obs, b, lambda, accepted_curvature);
            if (r <= cfg.fixed_point_tol) {
                early_stop = true;
                early_residual = r;
                break;
            }
        }
    }

    res.final_step_curvature = accepted_curvature;
    res.final_fixed_point_residual =
        early_stop ? early_residual
                   : fixed_point_residual(spec, obs, b, lambda, accepted_curvature);
    res.estimate = ParameterMatrix{std::move(b), cfg.eta};
    return res;
}

SolveResult solve_absolute(const ObservationSet& obs, const SolverConfig& cfg,
                           std::span<const double> kappa_schedule) {
    if (kappa_schedule.empty()) throw ArgumentError("solve_absolute: empty kappa schedule");
    for (std::size_t i = 0; i < kappa_schedule.size(); ++i) {
        if (kappa_schedule[i] <= 0)
            throw ArgumentError("solve_absolute: kappa schedule must be positive");
        if (i > 0 && kappa_schedule[i] >= kappa_schedule[i - 1])
            throw ArgumentError("solve_absolute: kappa schedule must be strictly decreasing");
    }

    SolveResult out;
    std::optional<Matrix> warm;
    for (double kappa : kappa_schedule) {
        SolveResult stage = solve(LossSpec::huber(kappa), obs, cfg, warm);
        warm = stage.estimate.data;
        out.objective_trace.insert(out.objective_trace.end(), stage.objective_trace.begin(),
                                   stage.objective_trace.end());
        out.accepted_deltas.insert(out.accepted_deltas.end(), stage.accepted_deltas.begin(),
                                   stage.accepted_deltas.end());
        out.iterations_run += stage.iterations_run;
        out.final_fixed_point_residual = stage.final_fixed_point_residual;
        out.final_step_curvature = stage.final_step_curvature;
        out.estimate = std::move(stage.estimate);
    }
    return out;
}

}  // namespace robustmc
