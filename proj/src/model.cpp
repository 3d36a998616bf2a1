#include "robustmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustmc {

void ObservationSet::validate() const {
    if (p <= 0 || q <= 0) throw DimensionError("observation set has non-positive dimensions");
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= p || e.col < 0 || e.col >= q)
            throw DimensionError("observation index out of bounds");
    }
}

NoiseModel NoiseModel::gaussian(double stddev, std::uint64_t seed) {
    if (stddev <= 0) throw ArgumentError("gaussian noise requires stddev > 0");
    return NoiseModel{Kind::gaussian, stddev, seed};
}

NoiseModel NoiseModel::student_t(double dof, std::uint64_t seed) {
    if (dof <= 0) throw ArgumentError("student_t noise requires dof > 0");
    return NoiseModel{Kind::student_t, dof, seed};
}

NoiseModel NoiseModel::none() { return NoiseModel{Kind::none, 0.0, 0}; }

GroundTruth generate_low_rank(int p, int q, int s0, double eta, std::uint64_t seed) {
    if (p <= 0 || q <= 0 || s0 < 1 || s0 > std::min(p, q))
        throw DimensionError("generate_low_rank: need p,q >= 1 and 1 <= s0 <= min(p,q)");
    if (eta <= 0) throw ArgumentError("generate_low_rank: eta must be positive");

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix u(p, s0), v(q, s0);
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < s0; ++k) u(i, k) = gauss(rng);
    for (int j = 0; j < q; ++j)
        for (int k = 0; k < s0; ++k) v(j, k) = gauss(rng);

    Matrix b = u * v.transpose();
    const double peak = b.cwiseAbs().maxCoeff();
    if (!(peak > 0) || !std::isfinite(peak))
        throw NumericError("generate_low_rank: degenerate factor product");
    b *= (eta / 2.0) / peak;
    return GroundTruth{ParameterMatrix{std::move(b), eta}, s0};
}

namespace {

class NoiseStream {
public:
    explicit NoiseStream(const NoiseModel& model)
        : kind_(model.kind), rng_(model.seed), gauss_(0.0, model.kind == NoiseModel::Kind::gaussian
                                                              ? model.param
                                                              : 1.0),
          student_(model.kind == NoiseModel::Kind::student_t ? model.param : 1.0) {}

    double next() {
        switch (kind_) {
            case NoiseModel::Kind::gaussian: return gauss_(rng_);
            case NoiseModel::Kind::student_t: return student_(rng_);
            case NoiseModel::Kind::none: return 0.0;
        }
        return 0.0;
    }

private:
    NoiseModel::Kind kind_;
    Rng rng_;
    std::normal_distribution<double> gauss_;
    std::student_t_distribution<double> student_;
};

}  // namespace

ObservationSet sample_uniform(const GroundTruth& truth, int n, const NoiseModel& noise,
                              std::uint64_t seed, bool exhaustive) {
    const Matrix& b = truth.b_star.data;
    const int p = static_cast<int>(b.rows());
    const int q = static_cast<int>(b.cols());
    if (n <= 0) throw ArgumentError("sample_uniform: n must be positive");
    if (exhaustive && n != p * q)
        throw ArgumentError("sample_uniform: exhaustive enumeration requires n == p*q");

    ObservationSet obs;
    obs.p = p;
    obs.q = q;
    obs.entries.reserve(static_cast<std::size_t>(n));

    NoiseStream eps(noise);
    if (exhaustive) {
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < q; ++c) obs.entries.push_back({r, c, b(r, c) + eps.next()});
        return obs;
    }

    Rng rng(seed);
    std::uniform_int_distribution<int> row_dist(0, p - 1), col_dist(0, q - 1);
    for (int i = 0; i < n; ++i) {
        const int r = row_dist(rng);
        const int c = col_dist(rng);
        obs.entries.push_back({r, c, b(r, c) + eps.next()});
    }
    return obs;
}

ObservationSet corrupt(const ObservationSet& obs, const CorruptionModel& model) {
    if (model.fraction < 0.0 || model.fraction > 1.0)
        throw ArgumentError("corrupt: fraction must lie in [0,1]");
    obs.validate();

    ObservationSet out = obs;
    const int n = obs.n();
    const int k = static_cast<int>(std::llround(model.fraction * n));
    if (k == 0) return out;

    // Partial Fisher-Yates: the first k slots end up holding a uniform
    // without-replacement sample of entry indices.
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(model.seed);
    std::uniform_int_distribution<int> sign_dist(0, 1);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    for (int i = 0; i < k; ++i) {
        const double sign = sign_dist(rng) == 0 ? 1.0 : -1.0;
        out.entries[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].value +=
            sign * model.magnitude;
    }
    return out;
}

Matrix observed_entry_matrix(const ObservationSet& obs) {
    obs.validate();
    Matrix sums = Matrix::Zero(obs.p, obs.q);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(obs.p, obs.q);
    for (const Entry& e : obs.entries) {
        sums(e.row, e.col) += e.value;
        counts(e.row, e.col) += 1;
    }
    for (int r = 0; r < obs.p; ++r)
        for (int c = 0; c < obs.q; ++c)
            if (counts(r, c) > 0) sums(r, c) /= counts(r, c);
    return sums;
}

}  // namespace robustmc
