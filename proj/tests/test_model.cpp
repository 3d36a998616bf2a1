#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <set>

#include "oracles.hpp"
#include "robustmc/model.hpp"

using namespace robustmc;

TEST_CASE("generate_low_rank rescales to eta/2 and is full rank at s0 = min(p,q)") {
    const GroundTruth t = generate_low_rank(2, 2, 2, 10.0, 7);
    CHECK(t.b_star.data.cwiseAbs().maxCoeff() == doctest::Approx(5.0).epsilon(1e-12));
    Eigen::BDCSVD<Matrix> svd(t.b_star.data);
    CHECK(svd.singularValues()(1) > 1e-8);
}

TEST_CASE("generate_low_rank produces numerical rank s0") {
    const GroundTruth t = generate_low_rank(30, 30, 2, 10.0, 1);
    Eigen::BDCSVD<Matrix> svd(t.b_star.data);
    const auto& sv = svd.singularValues();
    CHECK(sv(2) < 1e-10 * sv(0));
    CHECK(sv(1) > 1e-10 * sv(0));
    CHECK(t.rank == 2);
}

TEST_CASE("rank-1 truth has vanishing 2x2 minors") {
    const GroundTruth t = generate_low_rank(5, 5, 1, 10.0, 3);
    const double scale = t.b_star.data.cwiseAbs().maxCoeff();
    CHECK(oracles::max_abs_minor_2x2(t.b_star.data) < 1e-10 * scale * scale);
}

TEST_CASE("generate_low_rank argument checks") {
    CHECK_THROWS_AS(generate_low_rank(0, 5, 1, 10.0, 1), DimensionError);
    CHECK_THROWS_AS(generate_low_rank(5, 5, 0, 10.0, 1), DimensionError);
    CHECK_THROWS_AS(generate_low_rank(5, 5, 6, 10.0, 1), DimensionError);
    CHECK_THROWS_AS(generate_low_rank(5, 5, 1, 0.0, 1), ArgumentError);
}

TEST_CASE("generate_low_rank is deterministic in the seed") {
    const GroundTruth a = generate_low_rank(8, 6, 2, 10.0, 11);
    const GroundTruth b = generate_low_rank(8, 6, 2, 10.0, 11);
    const GroundTruth c = generate_low_rank(8, 6, 2, 10.0, 12);
    CHECK(a.b_star.data == b.b_star.data);
    CHECK(a.b_star.data != c.b_star.data);
}

TEST_CASE("exhaustive noiseless sampling reproduces the truth exactly") {
    const GroundTruth t = generate_low_rank(6, 5, 2, 10.0, 4);
    const ObservationSet obs = sample_uniform(t, 30, NoiseModel::none(), 99, true);
    REQUIRE(obs.n() == 30);
    std::set<std::pair<int, int>> cells;
    for (const Entry& e : obs.entries) {
        CHECK(e.value == t.b_star.data(e.row, e.col));
        cells.insert({e.row, e.col});
    }
    CHECK(cells.size() == 30);  // every cell exactly once
}

TEST_CASE("gaussian noise stream is centered") {
    const GroundTruth t = generate_low_rank(10, 10, 2, 10.0, 5);
    const int n = 100000;
    const ObservationSet obs = sample_uniform(t, n, NoiseModel::gaussian(1.0, 21), 22);
    double mean = 0.0;
    for (const Entry& e : obs.entries) mean += e.value - t.b_star.data(e.row, e.col);
    mean /= n;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("student-t noise has variance dof/(dof-2)") {
    const GroundTruth t = generate_low_rank(4, 4, 1, 10.0, 6);
    const int n = 1000000;
    const ObservationSet obs = sample_uniform(t, n, NoiseModel::student_t(3.0, 31), 32);
    double sum = 0.0, sumsq = 0.0;
    for (const Entry& e : obs.entries) {
        const double eps = e.value - t.b_star.data(e.row, e.col);
        sum += eps;
        sumsq += eps * eps;
    }
    const double var = sumsq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("sample_uniform argument checks") {
    const GroundTruth t = generate_low_rank(4, 4, 1, 10.0, 6);
    CHECK_THROWS_AS(sample_uniform(t, 0, NoiseModel::none(), 1), ArgumentError);
    CHECK_THROWS_AS(sample_uniform(t, -5, NoiseModel::none(), 1), ArgumentError);
    CHECK_THROWS_AS(sample_uniform(t, 15, NoiseModel::none(), 1, true), ArgumentError);
}

TEST_CASE("identical seeds reproduce bit-identical observation sets") {
    const GroundTruth t = generate_low_rank(7, 9, 2, 10.0, 8);
    const auto a = sample_uniform(t, 50, NoiseModel::student_t(3.0, 77), 78);
    const auto b = sample_uniform(t, 50, NoiseModel::student_t(3.0, 77), 78);
    REQUIRE(a.n() == b.n());
    for (int i = 0; i < a.n(); ++i) {
        CHECK(a.entries[i].row == b.entries[i].row);
        CHECK(a.entries[i].col == b.entries[i].col);
        CHECK(a.entries[i].value == b.entries[i].value);
    }
}

TEST_CASE("cell frequencies pass a chi-square uniformity test") {
    const GroundTruth t = generate_low_rank(10, 10, 1, 10.0, 9);
    const int n = 100000;
    const ObservationSet obs = sample_uniform(t, n, NoiseModel::none(), 123);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(10, 10);
    for (const Entry& e : obs.entries) counts(e.row, e.col)++;
    const double expected = n / 100.0;
    double stat = 0.0;
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 10; ++c) {
            const double d = counts(r, c) - expected;
            stat += d * d / expected;
        }
    const double critical =
        boost::math::quantile(boost::math::chi_squared_distribution<double>(99), 0.999);
    CHECK(stat < critical);
}

TEST_CASE("corrupt leaves data alone for fraction 0 or magnitude 0") {
    const GroundTruth t = generate_low_rank(6, 6, 2, 10.0, 10);
    const ObservationSet obs = sample_uniform(t, 40, NoiseModel::gaussian(1.0, 1), 2);

    for (const CorruptionModel cm : {CorruptionModel{0.0, 5.0, 3}, CorruptionModel{1.0, 0.0, 3}}) {
        const ObservationSet out = corrupt(obs, cm);
        REQUIRE(out.n() == obs.n());
        for (int i = 0; i < obs.n(); ++i) CHECK(out.entries[i].value == obs.entries[i].value);
    }
}

TEST_CASE("corrupt changes exactly round(fraction*n) entries") {
    const GroundTruth t = generate_low_rank(40, 25, 2, 10.0, 13);
    const ObservationSet obs = sample_uniform(t, 1000, NoiseModel::gaussian(1.0, 14), 15);
    const ObservationSet out = corrupt(obs, CorruptionModel{0.05, 10.0, 16});
    int changed = 0;
    for (int i = 0; i < obs.n(); ++i)
        if (out.entries[i].value != obs.entries[i].value) ++changed;
    CHECK(changed == 50);
}

TEST_CASE("corrupt rejects fractions outside [0,1]") {
    const GroundTruth t = generate_low_rank(4, 4, 1, 10.0, 6);
    const ObservationSet obs = sample_uniform(t, 10, NoiseModel::none(), 1);
    CHECK_THROWS_AS(corrupt(obs, CorruptionModel{-0.1, 1.0, 1}), ArgumentError);
    CHECK_THROWS_AS(corrupt(obs, CorruptionModel{1.5, 1.0, 1}), ArgumentError);
}

TEST_CASE("observed_entry_matrix averages duplicates and zeros the rest") {
    ObservationSet obs;
    obs.p = 3;
    obs.q = 2;
    obs.entries = {{0, 0, 2.0}, {0, 0, 4.0}, {2, 1, -1.0}};
    const Matrix m = observed_entry_matrix(obs);
    CHECK(m(0, 0) == 3.0);
    CHECK(m(2, 1) == -1.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(1, 1) == 0.0);
}
