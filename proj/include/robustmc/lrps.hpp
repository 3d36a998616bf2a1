#pragma once

#include "robustmc/solver.hpp"

namespace robustmc {

/// Low-rank plus sparse decomposition estimate. s_hat is materialized dense
/// here; internally its support never leaves the observed cells.
struct LrpsResult {
    ParameterMatrix l_hat;
    ParameterMatrix s_hat;
    std::vector<double> objective_trace;
    std::vector<double> accepted_deltas;
    int iterations_run = 0;
    double fixed_point_residual_l = 0.0;
    double fixed_point_residual_s = 0.0;
    double final_step_curvature = 0.0;
};

// Minimizes (1/n) sum_i (value_i - (L+S)[row,col])^2
//           + lambda1*||L||_nuclear + lambda2*||S||_1
// by joint accelerated proximal gradient steps: one quadratic-loss gradient
// feeds both blocks, then nuclear prox on L and entrywise soft-threshold on
// S, with the same backtracking and momentum scheme as solve(). config.lambda
// is ignored; lambda1/lambda2 take its place.
LrpsResult solve_lrps(const ObservationSet& obs, double lambda1, double lambda2,
                      const SolverConfig& config);

}  // namespace robustmc
