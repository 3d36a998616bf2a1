#pragma once

#include "robustmc/model.hpp"

namespace robustmc {

/// Thin SVD A = U diag(sigma) Vt with sigma nonincreasing and nonnegative.
struct SvdFactors {
    Matrix u;                 // p x m, orthonormal columns
    Vector singular_values;   // length m = min(p,q)
    Matrix vt;                // m x q, orthonormal rows
};

SvdFactors svd_thin(const Matrix& a);

// Scalar shrinkage: x-gamma if x > gamma, 0 if |x| <= gamma, x+gamma if
// x < -gamma. Symmetric extension of the paper's S_gamma; agrees at the
// stated points and is inert on nonnegative singular values.
double soft_threshold(double x, double gamma);

// argmin_B gamma*||B||_nuclear + 1/2*||B - W||_F^2 via a full SVD:
// U diag(S_gamma(sigma)) Vt. gamma = 0 returns W unchanged.
Matrix prox_nuclear(const Matrix& w, double gamma);

// Entrywise clip to [-eta, eta]. Applied after the nuclear prox when the
// solver's box_projection flag is on; the two proxes do not commute.
Matrix project_box(const Matrix& b, double eta);

}  // namespace robustmc
