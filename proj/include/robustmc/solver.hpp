#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "robustmc/losses.hpp"
#include "robustmc/prox.hpp"

namespace robustmc {

/// Accelerated proximal gradient hyperparameters. Defaults follow the
/// pseudocode: L = 0.1, beta = 1.2, backtracking threshold 0.001.
struct SolverConfig {
    double lambda = 0.0;          // nuclear norm penalty
    double l_init = 0.1;          // initial curvature estimate
    double beta = 1.2;            // backtracking factor, > 1
    double bt_tolerance = 0.001;  // backtracking stop threshold
    int max_iter = 1000;
    double fixed_point_tol = 0.0;  // early stop on fixed-point residual; 0 keeps the fixed budget
    bool box_projection = false;   // clip to [-eta, eta] after the nuclear prox
    double eta = 10.0;
};

struct SolveResult {
    ParameterMatrix estimate;
    std::vector<double> objective_trace;   // accepted objective per iteration
    std::vector<double> accepted_deltas;   // backtracking surrogate at each accepted step
    int iterations_run = 0;
    double final_fixed_point_residual = 0.0;
    double final_step_curvature = 0.0;
};

// Accelerated proximal gradient with backtracking line search. Per outer
// iteration t: cache obj = F(B) + lambda*||B||_nuclear, set B_prev = B, then
// backtrack B <- prox_{lambda/L}(v - (1/L) grad F(v)) with
//   delta = F(B) + lambda*||B||_nuclear - obj
//           - <grad F(B_prev), B - B_prev> - (L/2)*||B - B_prev||_F^2,
// growing L by beta while delta > bt_tolerance; afterwards L <- L/beta and
// v <- B + t/(t+3) (B - B_prev). The test deliberately uses grad F(B_prev),
// not grad F(v). Runs max_iter iterations, or stops early once
// ||B - prox_{lambda/L}(B - (1/L) grad F(B))||_F <= fixed_point_tol when a
// positive tolerance is set. init defaults to the zero matrix.
SolveResult solve(const LossSpec& spec, const ObservationSet& obs, const SolverConfig& config,
                  const std::optional<Matrix>& init = std::nullopt);

// ||B - prox_{lambda/curvature}(B - (1/curvature) grad F(B))||_F; zero
// exactly at minimizers.
double fixed_point_residual(const LossSpec& spec, const ObservationSet& obs, const Matrix& b,
                            double lambda, double curvature);

inline constexpr std::array<double, 5> kDefaultKappaSchedule{1.0, 0.3, 0.1, 0.03, 0.01};

// Absolute-value loss via Huber continuation: solve with Huber(kappa_j) for
// each kappa_j in the decreasing schedule, warm-starting from the previous
// stage. Traces are concatenated across stages; the reported residual and
// curvature come from the last (smallest-kappa) stage.
SolveResult solve_absolute(const ObservationSet& obs, const SolverConfig& config,
                           std::span<const double> kappa_schedule = kDefaultKappaSchedule);

}  // namespace robustmc
