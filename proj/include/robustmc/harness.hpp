#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robustmc/lrps.hpp"
#include "robustmc/solver.hpp"
#include "robustmc/theory.hpp"

namespace robustmc {

enum class LambdaRule { paper_sim, one_over_sqrt_n, explicit_value };

const char* lambda_rule_name(LambdaRule rule);

/// Full simulation description for one error curve.
struct ExperimentSpec {
    int p = 30;
    int q = 30;
    int s0 = 2;
    double eta = 10.0;
    double kappa = 1.345;  // Huber parameter; also feeds the oracle overlay
    NoiseModel noise = NoiseModel::student_t(3.0);
    std::optional<CorruptionModel> corruption;
    std::vector<LossSpec> losses;
    std::vector<int> n_grid;  // empty resolves to default_n_grid(p, q, s0)
    int replicates = 25;
    std::uint64_t base_seed = 42;
    LambdaRule lambda_rule = LambdaRule::paper_sim;
    double lambda_explicit = 0.0;
    SolverConfig solver;  // lambda/eta overwritten per point from the fields above
    int jobs = 0;         // replicate parallelism; <= 0 means all cores
};

struct ReplicateRecord {
    int p, q, s0, n, replicate;
    std::string loss;
    double kappa;
    double lambda;
    double error;
    int iterations;
    std::uint64_t seed;  // mask seed of the (replicate, n) data draw
};

struct CurvePoint {
    int n;
    std::string loss;
    double mean_error;
    double std_error;
    double oracle_value;
    double scaled_oracle;
};

struct CurveResult {
    ExperimentSpec spec;  // with the resolved n_grid
    std::vector<ReplicateRecord> records;  // (loss, n, replicate) order, failures excluded
    std::vector<CurvePoint> points;        // (loss, n) order
    std::vector<std::string> warnings;
    int failed_replicates = 0;
};

// 10 evenly spaced integers from ceil(3 * p * ln(p) * s0) to p*q, inclusive
// endpoints, deduplicated ascending.
std::vector<int> default_n_grid(int p, int q, int s0);

// lambda = 2 * sqrt(log(p+q) / (n*q))
double lambda_paper_sim(int p, int q, int n);

double resolve_lambda(const ExperimentSpec& spec, int n);

// (1/(pq)) * ||estimate - truth||_F^2
double compute_error(const Matrix& estimate, const Matrix& truth);

// One truth per replicate, shared across the n grid; every loss at a given
// (replicate, n) sees identical data. Numeric failures are dropped with a
// warning when they stay under 10% of the replicates at a point, otherwise
// the run aborts.
CurveResult run_error_curve(const ExperimentSpec& spec);

struct SizeStudyResult {
    std::vector<CurveResult> curves;  // one per problem size
};

// Error curves for each (p,q) in sizes over that size's default grid. The
// rescaled view divides n by 3*p*s0*ln(p).
SizeStudyResult run_problem_size_study(const std::vector<std::pair<int, int>>& sizes,
                                       const ExperimentSpec& base);

double rescaled_abscissa(int n, int p, int s0);

// Huber estimator vs the low-rank plus sparse estimator on identical data,
// lambda1 = 2*sqrt(log(p+q)/(nq)) and lambda2 = 2*log(p+q)/n. In corrupted
// mode 5% of the observations get +-eta added (or spec.corruption if set).
// Curves carry loss tags "huber" and "lrps".
CurveResult run_klopp_comparison(const ExperimentSpec& spec, bool corrupted);

struct RatingsData {
    ObservationSet obs;
    std::vector<long long> user_ids;  // row -> original user id
    std::vector<long long> item_ids;  // col -> original item id
    long duplicates_dropped = 0;
    long out_of_range_ratings = 0;
    std::vector<std::string> warnings;
};

// Tab-separated (u.data) or ::-separated (1M) layouts:
// user item rating [timestamp]. Users/items are reindexed to contiguous
// 0-based indices in order of first appearance; duplicates keep the first
// occurrence with a warning.
RatingsData parse_ratings(const std::string& path);

// Disjoint partition with |train| = n_train, drawn without replacement.
std::pair<ObservationSet, ObservationSet> split_train_test(const ObservationSet& obs, int n_train,
                                                           std::uint64_t seed);

// (1/n_test) * sum over test entries of (value - estimate[row,col])^2
double test_error(const Matrix& estimate, const ObservationSet& test);

struct RealDataConfig {
    std::string path;
    int n_train = 0;
    int max_iter = 6000;
    LambdaRule lambda_rule = LambdaRule::one_over_sqrt_n;
    double lambda_explicit = 0.0;
    double kappa = 2.0;
    double eta = 5.0;  // the rating scale bound
    std::uint64_t seed = 42;
    double fixed_point_tol = 0.0;
};

struct RealDataReport {
    RealDataConfig config;
    int p = 0, q = 0;
    int n = 0, n_test = 0;
    double lambda = 0.0;
    int iterations_run = 0;
    double final_fixed_point_residual = 0.0;
    double test_err = 0.0;
    std::vector<long long> user_ids;  // row -> original id, for inverse lookup
    std::vector<long long> item_ids;
    std::vector<std::string> warnings;

    std::string to_key_value() const;
};

// parse -> split -> Huber solve (init = observed-entry matrix) -> test error.
RealDataReport run_real_data(const RealDataConfig& config);

// Shortest round-trip decimal representation.
std::string format_double(double x);

// header: p,q,s0,n,replicate,loss,kappa,lambda,error,iterations,seed
void write_replicate_csv(std::ostream& out, const CurveResult& result);

// header: p,q,s0,n,loss,mean_error,stderr,oracle_value,scaled_oracle
void write_aggregate_csv(std::ostream& out, const CurveResult& result);
void write_aggregate_csv(std::ostream& out, const std::vector<CurveResult>& results);

// header: p,q,s0,n,rescaled_n,loss,mean_error,stderr
void write_rescaled_csv(std::ostream& out, const SizeStudyResult& study);

}  // namespace robustmc
