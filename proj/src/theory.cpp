#include "robustmc/theory.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "robustmc/parallel.hpp"

namespace robustmc {

double nuclear_norm(const Matrix& a) { return svd_thin(a).singular_values.sum(); }

double frobenius_norm(const Matrix& a) {
    if (!a.allFinite()) throw NumericError("frobenius_norm: non-finite input");
    return a.norm();
}

double spectral_norm(const Matrix& a) {
    if (!a.allFinite()) throw NumericError("spectral_norm: non-finite input");
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

ActiveDecomposition decompose_active(const Matrix& b, int s) {
    const int m = static_cast<int>(std::min(b.rows(), b.cols()));
    if (s < 1 || s > m) throw ArgumentError("decompose_active: s must lie in [1, min(p,q)]");
    SvdFactors f = svd_thin(b);

    ActiveDecomposition dec;
    dec.s = s;
    dec.p_plus = f.u.leftCols(s);
    dec.q_plus = f.vt.topRows(s).transpose();
    Vector head = f.singular_values;
    Vector tail = f.singular_values;
    head.tail(m - s).setZero();
    tail.head(s).setZero();
    dec.b_plus = f.u * head.asDiagonal() * f.vt;
    dec.b_minus = f.u * tail.asDiagonal() * f.vt;
    return dec;
}

namespace {

void check_dec_shapes(const ActiveDecomposition& dec, const Matrix& b_prime) {
    if (b_prime.rows() != dec.b_plus.rows() || b_prime.cols() != dec.b_plus.cols())
        throw DimensionError("semi-norm argument does not match the decomposition's shape");
}

}  // namespace

double omega_plus(const ActiveDecomposition& dec, const Matrix& b_prime) {
    check_dec_shapes(dec, b_prime);
    const Matrix left = dec.p_plus * (dec.p_plus.transpose() * b_prime);
    const Matrix right = (b_prime * dec.q_plus) * dec.q_plus.transpose();
    const Matrix both = dec.p_plus * (dec.p_plus.transpose() * right);
    return std::sqrt(static_cast<double>(dec.s)) * (left.norm() + right.norm() + both.norm());
}

double omega_minus(const ActiveDecomposition& dec, const Matrix& b_prime) {
    check_dec_shapes(dec, b_prime);
    const Matrix proj = b_prime - dec.p_plus * (dec.p_plus.transpose() * b_prime);
    const Matrix core = proj - (proj * dec.q_plus) * dec.q_plus.transpose();
    return nuclear_norm(core);
}

TriangleCheck check_triangle_property(const ActiveDecomposition& dec, const Matrix& b_prime) {
    const double lhs = nuclear_norm(dec.b_plus) - nuclear_norm(b_prime);
    const double rhs = omega_plus(dec, b_prime - dec.b_plus) - omega_minus(dec, b_prime);
    const double slack = rhs - lhs;
    return TriangleCheck{slack >= -1e-9, slack};
}

bool check_hoelder(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("check_hoelder: shape mismatch");
    const double lhs = a.cwiseProduct(b).sum();
    return lhs <= spectral_norm(a) * nuclear_norm(b) + 1e-9;
}

namespace {

double envelope(int p, int q, long n, double c0) {
    const double lp = std::log(static_cast<double>(p + q));
    return (8.0 * c0 + std::sqrt(2.0)) * std::sqrt(lp / (static_cast<double>(n) * q)) +
           8.0 * c0 * std::sqrt(std::log(1.0 + q)) * lp / n;
}

void check_pqn(int p, int q, long n) {
    if (p < 1 || q < 1) throw DimensionError("dimensions must be positive");
    if (n < 1) throw ArgumentError("sample size must be positive");
}

}  // namespace

TuningLevels lambda_eps_huber(int p, int q, long n, double kappa, double c0, double eta) {
    check_pqn(p, q, n);
    if (kappa <= 0) throw ArgumentError("lambda_eps_huber: kappa must be positive");
    if (eta <= 0) throw ArgumentError("lambda_eps_huber: eta must be positive");
    TuningLevels t;
    t.c0 = c0;
    t.lambda_eps = 4.0 * kappa * envelope(p, q, n, c0);
    t.lambda_star =
        16.0 * eta * kappa * p * std::log(static_cast<double>(p + q)) / (3.0 * n) + t.lambda_eps;
    return t;
}

TuningLevels lambda_eps_absolute(int p, int q, long n, double c0, double eta) {
    check_pqn(p, q, n);
    if (eta <= 0) throw ArgumentError("lambda_eps_absolute: eta must be positive");
    TuningLevels t;
    t.c0 = c0;
    t.lambda_eps = 2.0 * envelope(p, q, n, c0);
    t.lambda_star =
        8.0 * eta * p * std::log(static_cast<double>(p + q)) / (3.0 * n) + t.lambda_eps;
    return t;
}

double oracle_rate_sharp(int p, int q, long n, int s0, double kappa, double c1) {
    check_pqn(p, q, n);
    if (s0 < 1) throw ArgumentError("oracle_rate_sharp: s0 must be positive");
    return kappa * kappa * std::pow(c1, 4) * static_cast<double>(p) * p * q * s0 *
           std::log(static_cast<double>(p + q)) / n;
}

double oracle_rate_nonsharp(int p, int q, long n, int s0, double c2) {
    check_pqn(p, q, n);
    if (s0 < 1) throw ArgumentError("oracle_rate_nonsharp: s0 must be positive");
    return std::pow(c2, 4) * static_cast<double>(p) * p * q * s0 *
           std::log(static_cast<double>(p + q)) / n;
}

WeakSparsityBounds weak_sparsity_bounds(std::span<const double> singular_values, double r,
                                        double sigma) {
    if (!(r > 0 && r < 1)) throw ArgumentError("weak_sparsity_bounds: r must lie in (0,1)");
    if (sigma <= 0) throw ArgumentError("weak_sparsity_bounds: sigma must be positive");
    std::vector<double> sv(singular_values.begin(), singular_values.end());
    for (double v : sv)
        if (v < 0) throw ArgumentError("weak_sparsity_bounds: singular values must be nonnegative");
    std::sort(sv.begin(), sv.end(), std::greater<>());

    WeakSparsityBounds out;
    for (double v : sv) {
        out.rho_r_pow_r += std::pow(v, r);
        if (v > sigma)
            ++out.actual_s;
        else
            out.actual_tail += v;
    }
    out.nuclear_tail_bound = std::pow(sigma, 1.0 - r) * out.rho_r_pow_r;
    out.s_bound = std::pow(sigma, -r) * out.rho_r_pow_r;
    out.holds = out.actual_tail <= out.nuclear_tail_bound + 1e-12 &&
                out.actual_s <= out.s_bound + 1e-12;
    return out;
}

namespace {

void require_continuous(const NoiseModel& noise, const char* op) {
    if (noise.kind == NoiseModel::Kind::none)
        throw ArgumentError(std::string(op) + " requires a continuous noise model");
}

}  // namespace

double noise_cdf(const NoiseModel& noise, double x) {
    switch (noise.kind) {
        case NoiseModel::Kind::gaussian:
            return boost::math::cdf(boost::math::normal_distribution<double>(0.0, noise.param), x);
        case NoiseModel::Kind::student_t:
            return boost::math::cdf(boost::math::students_t_distribution<double>(noise.param), x);
        case NoiseModel::Kind::none: return x < 0 ? 0.0 : (x > 0 ? 1.0 : 0.5);
    }
    return 0.0;
}

double noise_pdf(const NoiseModel& noise, double x) {
    require_continuous(noise, "noise_pdf");
    switch (noise.kind) {
        case NoiseModel::Kind::gaussian:
            return boost::math::pdf(boost::math::normal_distribution<double>(0.0, noise.param), x);
        case NoiseModel::Kind::student_t:
            return boost::math::pdf(boost::math::students_t_distribution<double>(noise.param), x);
        case NoiseModel::Kind::none: break;
    }
    return 0.0;
}

namespace {

double noise_sf(const NoiseModel& noise, double x) {
    switch (noise.kind) {
        case NoiseModel::Kind::gaussian:
            return boost::math::cdf(boost::math::complement(
                boost::math::normal_distribution<double>(0.0, noise.param), x));
        case NoiseModel::Kind::student_t:
            return boost::math::cdf(boost::math::complement(
                boost::math::students_t_distribution<double>(noise.param), x));
        case NoiseModel::Kind::none: return x < 0 ? 1.0 : (x > 0 ? 0.0 : 0.5);
    }
    return 0.0;
}

// P(center - halfwidth < eps <= center + halfwidth). Uses survival functions
// on the positive side: the plain CDF difference cancels to zero once both
// arguments saturate to 1.
double two_point_mass(const NoiseModel& noise, double center, double halfwidth) {
    if (center > 0)
        return noise_sf(noise, center - halfwidth) - noise_sf(noise, center + halfwidth);
    return noise_cdf(noise, center + halfwidth) - noise_cdf(noise, center - halfwidth);
}

}  // namespace

namespace {

constexpr int kMarginGridPoints = 10000;

}  // namespace

MarginConstant margin_constant_c1(const NoiseModel& noise, double kappa, double eta) {
    require_continuous(noise, "margin_constant_c1");
    if (kappa <= 0) throw ArgumentError("margin_constant_c1: kappa must be positive");
    if (eta <= 0) throw ArgumentError("margin_constant_c1: eta must be positive");

    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kMarginGridPoints; ++i) {
        const double u = -eta + 2.0 * eta * i / (kMarginGridPoints - 1);
        lo = std::min(lo, two_point_mass(noise, u, kappa));
    }
    if (!(lo > 0)) throw NumericError("margin_constant_c1: vanishing two-point margin");
    return MarginConstant{1.0 / std::sqrt(lo), kappa > eta};
}

double margin_constant_c2(const NoiseModel& noise, double eta) {
    require_continuous(noise, "margin_constant_c2");
    if (eta <= 0) throw ArgumentError("margin_constant_c2: eta must be positive");

    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kMarginGridPoints; ++i) {
        const double u = -2.0 * eta + 4.0 * eta * i / (kMarginGridPoints - 1);
        lo = std::min(lo, noise_pdf(noise, u));
    }
    if (!(lo > 0)) throw NumericError("margin_constant_c2: vanishing density");
    return 1.0 / std::sqrt(lo);
}

double huber_risk_second_derivative(const NoiseModel& noise, double kappa, double b) {
    require_continuous(noise, "huber_risk_second_derivative");
    if (kappa <= 0) throw ArgumentError("huber_risk_second_derivative: kappa must be positive");
    return 2.0 * two_point_mass(noise, b, kappa);
}

double rademacher_lambda_max_mc(int p, int q, int n, int reps, std::uint64_t seed, int jobs) {
    if (p < 1 || q < 1) throw DimensionError("rademacher_lambda_max_mc: dimensions must be positive");
    if (n < 1 || reps < 1)
        throw ArgumentError("rademacher_lambda_max_mc: n and reps must be positive");

    std::vector<double> values(static_cast<std::size_t>(reps));
    parallel_for(reps, jobs, [&](int rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        std::uniform_int_distribution<int> row_dist(0, p - 1), col_dist(0, q - 1),
            sign_dist(0, 1);
        Matrix m = Matrix::Zero(p, q);
        for (int i = 0; i < n; ++i) {
            const int r = row_dist(rng);
            const int c = col_dist(rng);
            m(r, c) += sign_dist(rng) == 0 ? 1.0 : -1.0;
        }
        values[static_cast<std::size_t>(rep)] = spectral_norm(m) / n;
    });

    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / reps;
}

}  // namespace robustmc
