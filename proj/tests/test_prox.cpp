#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "robustmc/prox.hpp"
#include "robustmc/theory.hpp"

using namespace robustmc;

TEST_CASE("soft threshold branches") {
    CHECK(soft_threshold(5.0, 2.0) == 3.0);
    CHECK(soft_threshold(2.0, 2.0) == 0.0);  // x = gamma maps to 0
    CHECK(soft_threshold(0.7, 0.7) == 0.0);
    CHECK(soft_threshold(-0.5, 2.0) == 0.0);
    CHECK(soft_threshold(-5.0, 2.0) == -3.0);
    CHECK_THROWS_AS(soft_threshold(1.0, -0.1), ArgumentError);
}

TEST_CASE("svd_thin reconstructs its input") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Matrix a = oracles::random_matrix(9, 6, seed);
        const SvdFactors f = svd_thin(a);
        CHECK((f.u * f.singular_values.asDiagonal() * f.vt - a).norm() < 1e-8 * a.norm());
        for (Eigen::Index i = 0; i + 1 < f.singular_values.size(); ++i)
            CHECK(f.singular_values(i) >= f.singular_values(i + 1));
        CHECK(f.singular_values.minCoeff() >= 0.0);
    }
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_thin(bad), NumericError);
}

TEST_CASE("prox_nuclear identity at gamma 0 and diagonal shrinkage") {
    const Matrix w = oracles::random_matrix(7, 5, 4);
    CHECK((prox_nuclear(w, 0.0) - w).norm() < 1e-10);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    const Matrix out = prox_nuclear(d, 2.0);
    CHECK(out(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(out(1, 1)) < 1e-10);
    CHECK(std::abs(out(0, 1)) < 1e-10);
}

TEST_CASE("prox output singular values are soft-thresholded input singular values") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix w = oracles::random_matrix(10, 8, 100 + seed);
        for (double gamma : {0.1, 0.7, 2.0}) {
            const Vector sw = svd_thin(w).singular_values;
            const Vector sp = svd_thin(prox_nuclear(w, gamma)).singular_values;
            for (Eigen::Index k = 0; k < sw.size(); ++k)
                CHECK(std::abs(sp(k) - std::max(sw(k) - gamma, 0.0)) < 1e-8);
        }
    }
}

TEST_CASE("prox solves the nuclear-norm proximity problem") {
    const Matrix w = oracles::random_matrix(10, 8, 77);
    const double gamma = 0.7;
    const Matrix b = prox_nuclear(w, gamma);
    const double obj = oracles::prox_objective(b, w, gamma);

    // strong-duality certificate: primal value must meet the dual value
    CHECK(obj - oracles::prox_dual_value(w, gamma) < 1e-6);

    // and an independent projected-subgradient run must not find anything better
    const double sg_best = oracles::prox_subgradient_best(w, gamma, 200000);
    CHECK(obj <= sg_best + 1e-6);
    CHECK(sg_best - obj < 1e-3);
}

TEST_CASE("prox beats random perturbations") {
    std::mt19937_64 rng(55);
    const Matrix w = oracles::random_matrix(8, 6, 56);
    for (double gamma : {0.1, 1.0}) {
        const Matrix b = prox_nuclear(w, gamma);
        const double obj = oracles::prox_objective(b, w, gamma);
        for (int k = 0; k < 50; ++k) {
            const Matrix delta = oracles::random_matrix(8, 6, rng(), 0.1);
            CHECK(obj <= oracles::prox_objective(b + delta, w, gamma) + 1e-12);
        }
    }
}

TEST_CASE("prox is nonexpansive") {
    std::mt19937_64 rng(60);
    for (int k = 0; k < 100; ++k) {
        const Matrix w1 = oracles::random_matrix(6, 5, rng());
        const Matrix w2 = oracles::random_matrix(6, 5, rng());
        const double gamma = 0.3 + 0.01 * k;
        CHECK((prox_nuclear(w1, gamma) - prox_nuclear(w2, gamma)).norm() <=
              (w1 - w2).norm() + 1e-10);
    }
}

TEST_CASE("project_box clips entrywise") {
    Matrix b(2, 2);
    b << 3.0, 12.0, -11.5, -9.0;
    const Matrix out = project_box(b, 10.0);
    CHECK(out(0, 0) == 3.0);
    CHECK(out(0, 1) == 10.0);
    CHECK(out(1, 0) == -10.0);
    CHECK(out(1, 1) == -9.0);

    const Matrix inside = Matrix::Constant(3, 3, 2.5);
    CHECK((project_box(inside, 10.0) - inside).norm() == 0.0);
    CHECK_THROWS_AS(project_box(b, 0.0), ArgumentError);
    CHECK_THROWS_AS(project_box(b, -1.0), ArgumentError);
}
