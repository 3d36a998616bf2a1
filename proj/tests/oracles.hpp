// Test-only oracles: brute-force minimizers, quadrature, finite differences
// and closed-form distribution functions. Everything here stays independent
// of the code paths it is used to check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace oracles {

using Matrix = Eigen::MatrixXd;

inline Matrix random_matrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct GridMin {
    double arg = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

inline GridMin grid_search_1d(const std::function<double(double)>& f, double lo, double hi,
                              double step) {
    GridMin best;
    for (double x = lo; x <= hi + step / 2; x += step) {
        const double v = f(x);
        if (v < best.value) best = GridMin{x, v};
    }
    return best;
}

inline double grid_search_2d_value(const std::function<double(double, double)>& f, double lo,
                                   double hi, double step) {
    double best = std::numeric_limits<double>::infinity();
    for (double x = lo; x <= hi + step / 2; x += step)
        for (double y = lo; y <= hi + step / 2; y += step) best = std::min(best, f(x, y));
    return best;
}

// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 24) {
    const auto simpson = [&f](double lo, double hi) {
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f((lo + hi) / 2) + f(hi));
    };
    std::function<double(double, double, double, int)> rec = [&](double lo, double hi,
                                                                 double whole, int d) -> double {
        const double mid = (lo + hi) / 2;
        const double left = simpson(lo, mid);
        const double right = simpson(mid, hi);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, simpson(a, b), depth);
}

// Standard normal CDF through erfc; accurate deep in the tails.
inline double normal_cdf(double x, double stddev = 1.0) {
    return 0.5 * std::erfc(-x / (stddev * std::sqrt(2.0)));
}

inline double normal_pdf(double x, double stddev = 1.0) {
    const double z = x / stddev;
    return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * M_PI));
}

// Closed forms for the t distribution with 3 degrees of freedom.
inline double t3_cdf(double x) {
    const double u = x / std::sqrt(3.0);
    return 0.5 + (1.0 / M_PI) * (u / (1.0 + u * u) + std::atan(u));
}

inline double t3_pdf(double x) {
    const double base = 1.0 + x * x / 3.0;
    return 2.0 / (M_PI * std::sqrt(3.0)) * 1.0 / (base * base);
}

// Huber value with the x^2 scaling; duplicated here so loss checks do not
// route through the implementation under test.
inline double huber_value(double x, double kappa) {
    const double a = std::abs(x);
    return a <= kappa ? x * x : 2.0 * kappa * a - kappa * kappa;
}

// g(B) = gamma*||B||_nuclear + 1/2*||B - W||_F^2
inline double prox_objective(const Matrix& b, const Matrix& w, double gamma) {
    Eigen::BDCSVD<Matrix> svd(b);
    return gamma * svd.singularValues().sum() + 0.5 * (b - w).squaredNorm();
}

// Subgradient descent on the prox objective with 1/k steps (the objective is
// 1-strongly convex). Returns the best objective value seen.
inline double prox_subgradient_best(const Matrix& w, double gamma, int iters) {
    Matrix b = w;  // any starting point; w keeps early iterates well scaled
    double best = prox_objective(b, w, gamma);
    for (int k = 1; k <= iters; ++k) {
        Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Matrix sub = svd.matrixU() * svd.matrixV().transpose();  // in d||B||_nuclear
        const Matrix g = gamma * sub + (b - w);
        b -= (1.0 / k) * g;
        best = std::min(best, prox_objective(b, w, gamma));
    }
    return best;
}

// Strong-duality lower bound on the prox objective: the dual optimum is the
// projection of W onto the spectral-norm ball of radius gamma (singular
// values clipped, not shrunk), with value <D,W> - 1/2*||D||_F^2.
inline double prox_dual_value(const Matrix& w, double gamma) {
    Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(s(i), gamma);
    const Matrix d = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    return d.cwiseProduct(w).sum() - 0.5 * d.squaredNorm();
}

// Largest absolute 2x2 minor; zero for rank-1 matrices.
inline double max_abs_minor_2x2(const Matrix& m) {
    double worst = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int k = i + 1; k < m.rows(); ++k)
            for (int j = 0; j < m.cols(); ++j)
                for (int l = j + 1; l < m.cols(); ++l)
                    worst = std::max(worst, std::abs(m(i, j) * m(k, l) - m(i, l) * m(k, j)));
    return worst;
}

}  // namespace oracles
