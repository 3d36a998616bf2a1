#pragma once

#include <span>

#include "robustmc/model.hpp"
#include "robustmc/prox.hpp"

namespace robustmc {

double nuclear_norm(const Matrix& a);
double frobenius_norm(const Matrix& a);
double spectral_norm(const Matrix& a);

/// SVD split of B at singular index s: b_plus carries the top-s triples
/// ("active" part), b_minus the rest. p_plus/q_plus span the active
/// row/column spaces.
struct ActiveDecomposition {
    int s = 0;
    Matrix p_plus;   // p x s
    Matrix q_plus;   // q x s
    Matrix b_plus;
    Matrix b_minus;
};

ActiveDecomposition decompose_active(const Matrix& b, int s);

// sqrt(s) * (||P+ P+^T B'||_F + ||B' Q+ Q+^T||_F + ||P+ P+^T B' Q+ Q+^T||_F)
double omega_plus(const ActiveDecomposition& dec, const Matrix& b_prime);

// ||(I - P+ P+^T) B' (I - Q+ Q+^T)||_nuclear
double omega_minus(const ActiveDecomposition& dec, const Matrix& b_prime);

/// slack = RHS - LHS of
/// ||B+||_nuclear - ||B'||_nuclear <= Omega+(B' - B+) - Omega-(B').
struct TriangleCheck {
    bool pass = false;
    double slack = 0.0;
};

TriangleCheck check_triangle_property(const ActiveDecomposition& dec, const Matrix& b_prime);

// trace(A^T B) <= Lambda_max(A) * ||B||_nuclear (dual norm inequality).
bool check_hoelder(const Matrix& a, const Matrix& b);

/// Noise level lambda_eps and the additive remainder lambda_star; c0 is the
/// universal constant the bounds leave unspecified (user-supplied).
struct TuningLevels {
    double lambda_eps = 0.0;
    double lambda_star = 0.0;
    double c0 = 1.0;
};

// lambda_eps = 4*kappa*((8*c0 + sqrt(2))*sqrt(log(p+q)/(n*q))
//                       + 8*c0*sqrt(log(1+q))*log(p+q)/n),
// lambda_star = 16*eta*kappa*p*log(p+q)/(3n) + lambda_eps.
TuningLevels lambda_eps_huber(int p, int q, long n, double kappa, double c0, double eta);

// Same with the factor 2 in place of 4*kappa (Lipschitz constant 1) and
// lambda_star = 8*eta*p*log(p+q)/(3n) + lambda_eps.
TuningLevels lambda_eps_absolute(int p, int q, long n, double c0, double eta);

// kappa^2 * c1^4 * p^2 * q * s0 * log(p+q) / n (O_P constant taken as 1).
double oracle_rate_sharp(int p, int q, long n, int s0, double kappa, double c1);

// c2^4 * p^2 * q * s0 * log(p+q) / n.
double oracle_rate_nonsharp(int p, int q, long n, int s0, double c2);

struct WeakSparsityBounds {
    double rho_r_pow_r = 0.0;       // sum_k Lambda_k^r
    double nuclear_tail_bound = 0.0;  // sigma^(1-r) * rho_r^r
    double s_bound = 0.0;             // sigma^(-r) * rho_r^r
    double actual_tail = 0.0;         // sum of singular values <= sigma
    int actual_s = 0;                 // count of singular values > sigma
    bool holds = false;
};

WeakSparsityBounds weak_sparsity_bounds(std::span<const double> singular_values, double r,
                                        double sigma);

// Distribution function / density of the noise model (continuous kinds).
double noise_cdf(const NoiseModel& noise, double x);
double noise_pdf(const NoiseModel& noise, double x);

/// assumption_violated flags kappa > eta, outside the margin assumption's
/// stated scope; the value is still computed.
struct MarginConstant {
    double value = 0.0;
    bool assumption_violated = false;
};

// C1 = 1/sqrt(min_{|u| <= eta} F(u+kappa) - F(u-kappa)), minimized over a
// 10^4-point grid of u.
MarginConstant margin_constant_c1(const NoiseModel& noise, double kappa, double eta);

// C2 = 1/sqrt(min_{|u| <= 2 eta} f(u)), same grid resolution.
double margin_constant_c2(const NoiseModel& noise, double eta);

// 2*(F(b+kappa) - F(b-kappa)): curvature of the one-cell Huber risk.
double huber_risk_second_derivative(const NoiseModel& noise, double kappa, double b);

// Monte-Carlo mean of Lambda_max(sum_i eps~_i X_i)/n over `reps` draws of n
// uniform masks with Rademacher signs. Rep seeds derive from `seed`; the
// mean reduces in fixed rep order regardless of `jobs`.
double rademacher_lambda_max_mc(int p, int q, int n, int reps, std::uint64_t seed, int jobs = 1);

}  // namespace robustmc
