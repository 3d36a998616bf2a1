#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "robustmc/errors.hpp"
#include "robustmc/rng.hpp"

namespace robustmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One sampled cell of the trace regression model: Y = B[row,col] + noise.
struct Entry {
    int row;
    int col;
    double value;
};

/// Sparse list of (X_i, Y_i) samples. Duplicates are allowed: i.i.d. masks
/// may hit the same cell twice with different noise.
struct ObservationSet {
    std::vector<Entry> entries;
    int p = 0;
    int q = 0;

    int n() const { return static_cast<int>(entries.size()); }
    void validate() const;
};

/// Dense optimization variable together with its box bound |B_ij| <= eta.
struct ParameterMatrix {
    Matrix data;
    double eta = 0.0;
};

struct GroundTruth {
    ParameterMatrix b_star;
    int rank = 0;
};

struct NoiseModel {
    enum class Kind { gaussian, student_t, none };

    Kind kind = Kind::none;
    double param = 0.0;  // stddev for gaussian, degrees of freedom for student_t
    std::uint64_t seed = 0;

    static NoiseModel gaussian(double stddev, std::uint64_t seed = 0);
    static NoiseModel student_t(double dof, std::uint64_t seed = 0);
    static NoiseModel none();

    /// With a new seed, everything else unchanged.
    NoiseModel with_seed(std::uint64_t s) const {
        NoiseModel m = *this;
        m.seed = s;
        return m;
    }
};

/// Entrywise sparse corruption: round(fraction*n) observations get
/// +-magnitude added to their value.
struct CorruptionModel {
    double fraction = 0.0;
    double magnitude = 0.0;
    std::uint64_t seed = 0;
};

// Rank-s0 truth B0 = U V^T with i.i.d. Gaussian factors, rescaled so
// max |entry| = eta/2 (the box constraint is inactive at the truth).
GroundTruth generate_low_rank(int p, int q, int s0, double eta, std::uint64_t seed);

// n i.i.d. uniform masks over the p*q grid, value = truth entry + noise.
// With exhaustive=true (requires n == p*q) every cell is visited once in
// row-major order instead; used by noiseless identity checks only.
ObservationSet sample_uniform(const GroundTruth& truth, int n, const NoiseModel& noise,
                              std::uint64_t seed, bool exhaustive = false);

ObservationSet corrupt(const ObservationSet& obs, const CorruptionModel& model);

// Mean of the observed values per cell (zeros elsewhere); the B_obs
// initializer of the proximal algorithm for real-data runs.
Matrix observed_entry_matrix(const ObservationSet& obs);

}  // namespace robustmc
