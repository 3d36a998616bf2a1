// Command-line front end: simulation curves, the problem-size study, the
// low-rank+sparse comparison, the ratings pipeline and numeric self-checks.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "robustmc/harness.hpp"
#include "robustmc/parallel.hpp"

namespace fs = std::filesystem;
using namespace robustmc;

namespace {

NoiseModel parse_noise(const std::string& token) {
    const auto colon = token.find(':');
    const std::string kind = token.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
    if (kind == "none") return NoiseModel::none();
    if (kind == "gaussian") return NoiseModel::gaussian(arg.empty() ? 1.0 : std::stod(arg));
    if (kind == "student-t") return NoiseModel::student_t(arg.empty() ? 3.0 : std::stod(arg));
    throw CLI::ValidationError("--noise", "expected none, gaussian:SD or student-t:DOF");
}

std::vector<LossSpec> parse_losses(const std::string& csv) {
    std::vector<LossSpec> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto colon = token.find(':');
        const std::string kind = token.substr(0, colon);
        if (kind == "quadratic")
            out.push_back(LossSpec::quadratic());
        else if (kind == "absolute")
            out.push_back(LossSpec::absolute());
        else if (kind == "huber")
            out.push_back(LossSpec::huber(
                colon == std::string::npos ? 1.345 : std::stod(token.substr(colon + 1))));
        else
            throw CLI::ValidationError("--losses", "expected huber[:KAPPA], quadratic, absolute");
    }
    if (out.empty()) throw CLI::ValidationError("--losses", "no loss given");
    return out;
}

LambdaRule parse_rule(const std::string& token) {
    if (token == "paper-sim") return LambdaRule::paper_sim;
    if (token == "one-over-sqrt-n") return LambdaRule::one_over_sqrt_n;
    if (token == "explicit") return LambdaRule::explicit_value;
    throw CLI::ValidationError("--lambda-rule", "expected paper-sim, one-over-sqrt-n or explicit");
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(std::stoi(token));
    return out;
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("ROBUSTMC_SEED")) return std::stoull(env);
    return cli_seed;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << content;
}

void echo_spec(const ExperimentSpec& spec) {
    std::cout << "p=" << spec.p << "\nq=" << spec.q << "\ns0=" << spec.s0
              << "\neta=" << format_double(spec.eta) << "\nkappa=" << format_double(spec.kappa)
              << "\nnoise="
              << (spec.noise.kind == NoiseModel::Kind::none
                      ? "none"
                      : (spec.noise.kind == NoiseModel::Kind::gaussian ? "gaussian:" : "student-t:") +
                            format_double(spec.noise.param))
              << "\nlosses=";
    for (std::size_t i = 0; i < spec.losses.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << spec.losses[i].name();
        if (spec.losses[i].kind == LossKind::huber)
            std::cout << ':' << format_double(spec.losses[i].kappa);
    }
    std::cout << "\nn_grid=";
    for (std::size_t i = 0; i < spec.n_grid.size(); ++i)
        std::cout << (i ? "," : "") << spec.n_grid[i];
    std::cout << "\nreplicates=" << spec.replicates << "\nseed=" << spec.base_seed
              << "\nlambda_rule=" << lambda_rule_name(spec.lambda_rule);
    if (spec.lambda_rule == LambdaRule::explicit_value)
        std::cout << "\nlambda=" << format_double(spec.lambda_explicit);
    if (spec.corruption)
        std::cout << "\ncorruption_fraction=" << format_double(spec.corruption->fraction)
                  << "\ncorruption_magnitude=" << format_double(spec.corruption->magnitude);
    std::cout << "\nmax_iter=" << spec.solver.max_iter
              << "\nfixed_point_tol=" << format_double(spec.solver.fixed_point_tol)
              << "\nbox_projection=" << (spec.solver.box_projection ? "on" : "off")
              << "\njobs=" << spec.jobs << "\nrng=" << kRngName << "\n";
}

void report_warnings(const CurveResult& run) {
    for (const std::string& w : run.warnings) std::cerr << "warning: " << w << "\n";
}

struct CommonFlags {
    int p = 30, q = 30, s0 = 2;
    double eta = 10.0, kappa = 1.345;
    std::string noise = "student-t:3";
    std::string n_grid;
    int replicates = 25;
    std::uint64_t seed = 42;
    std::string lambda_rule = "paper-sim";
    double lambda = 0.0;
    int max_iter = 1500;
    double fp_tol = 1e-5;
    bool box_projection = false;
    int jobs = 0;
    std::string out = "results";
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_dims = true) {
    if (with_dims) {
        cmd->add_option("--p", f.p, "rows of the parameter matrix")->check(CLI::PositiveNumber);
        cmd->add_option("--q", f.q, "columns of the parameter matrix")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--s0", f.s0, "rank of the generated truth")->check(CLI::PositiveNumber);
    cmd->add_option("--eta", f.eta, "entrywise box bound")->check(CLI::PositiveNumber);
    cmd->add_option("--kappa", f.kappa, "huber knot")->check(CLI::PositiveNumber);
    cmd->add_option("--noise", f.noise, "none | gaussian:SD | student-t:DOF");
    cmd->add_option("--n-grid", f.n_grid, "explicit comma-separated sample sizes");
    cmd->add_option("--replicates", f.replicates, "simulations per grid point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "base seed (ROBUSTMC_SEED overrides)");
    cmd->add_option("--lambda-rule", f.lambda_rule, "paper-sim | one-over-sqrt-n | explicit");
    cmd->add_option("--lambda", f.lambda, "penalty for --lambda-rule explicit");
    cmd->add_option("--max-iter", f.max_iter, "solver iteration budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fp-tol", f.fp_tol, "fixed-point early-stop tolerance (0 disables)");
    cmd->add_flag("--box-projection", f.box_projection, "clip iterates to [-eta, eta]");
    cmd->add_option("--jobs", f.jobs, "replicate parallelism (0 = all cores)");
    cmd->add_option("--out", f.out, "output directory");
}

ExperimentSpec spec_from_flags(const CommonFlags& f) {
    ExperimentSpec spec;
    spec.p = f.p;
    spec.q = f.q;
    spec.s0 = f.s0;
    spec.eta = f.eta;
    spec.kappa = f.kappa;
    spec.noise = parse_noise(f.noise);
    if (!f.n_grid.empty()) spec.n_grid = parse_int_list(f.n_grid);
    spec.replicates = f.replicates;
    spec.base_seed = effective_seed(f.seed);
    spec.lambda_rule = parse_rule(f.lambda_rule);
    spec.lambda_explicit = f.lambda;
    spec.solver.max_iter = f.max_iter;
    spec.solver.fixed_point_tol = f.fp_tol;
    spec.solver.box_projection = f.box_projection;
    spec.jobs = f.jobs;
    return spec;
}

int run_simulate(const CommonFlags& flags, const std::string& losses) {
    ExperimentSpec spec = spec_from_flags(flags);
    spec.losses = parse_losses(losses);
    echo_spec(spec);

    const CurveResult run = run_error_curve(spec);
    report_warnings(run);

    const fs::path dir = prepare_out_dir(flags.out);
    std::ostringstream rep, agg;
    write_replicate_csv(rep, run);
    write_aggregate_csv(agg, run);
    write_text(dir / "replicates.csv", rep.str());
    write_text(dir / "curves.csv", agg.str());
    std::cout << "wrote " << (dir / "replicates.csv").string() << "\n"
              << "wrote " << (dir / "curves.csv").string() << "\n";
    return 0;
}

int run_size_study(const CommonFlags& flags, const std::string& sizes_csv,
                   const std::string& losses) {
    ExperimentSpec base = spec_from_flags(flags);
    base.losses = parse_losses(losses);
    std::vector<std::pair<int, int>> sizes;
    for (int s : parse_int_list(sizes_csv)) sizes.emplace_back(s, s);
    echo_spec(base);
    std::cout << "sizes=" << sizes_csv << "\n";

    const SizeStudyResult study = run_problem_size_study(sizes, base);
    const fs::path dir = prepare_out_dir(flags.out);
    std::ostringstream agg, rescaled;
    write_aggregate_csv(agg, study.curves);
    write_rescaled_csv(rescaled, study);
    write_text(dir / "curves.csv", agg.str());
    write_text(dir / "curves_rescaled.csv", rescaled.str());
    for (const CurveResult& curve : study.curves) {
        report_warnings(curve);
        std::ostringstream rep;
        write_replicate_csv(rep, curve);
        write_text(dir / ("replicates_p" + std::to_string(curve.spec.p) + ".csv"), rep.str());
    }
    std::cout << "wrote " << (dir / "curves.csv").string() << "\n"
              << "wrote " << (dir / "curves_rescaled.csv").string() << "\n";
    return 0;
}

int run_compare(const CommonFlags& flags, bool corrupted, double fraction, double magnitude) {
    ExperimentSpec spec = spec_from_flags(flags);
    if (corrupted)
        spec.corruption = CorruptionModel{fraction, magnitude > 0 ? magnitude : spec.eta, 0};
    echo_spec(spec);
    std::cout << "corrupted=" << (corrupted ? "yes" : "no") << "\n";

    const CurveResult run = run_klopp_comparison(spec, corrupted);
    report_warnings(run);
    const fs::path dir = prepare_out_dir(flags.out);
    std::ostringstream rep, agg;
    write_replicate_csv(rep, run);
    write_aggregate_csv(agg, run);
    write_text(dir / "replicates.csv", rep.str());
    write_text(dir / "curves.csv", agg.str());
    std::cout << "wrote " << (dir / "curves.csv").string() << "\n";
    return 0;
}

int run_real(const std::string& ratings, int n_train, int max_iter, double kappa, double eta,
             const std::string& rule, double lambda, std::uint64_t seed, double fp_tol,
             const std::string& out) {
    RealDataConfig cfg;
    cfg.path = ratings;
    cfg.n_train = n_train;
    cfg.max_iter = max_iter;
    cfg.kappa = kappa;
    cfg.eta = eta;
    cfg.lambda_rule = parse_rule(rule);
    cfg.lambda_explicit = lambda;
    cfg.seed = effective_seed(seed);
    cfg.fixed_point_tol = fp_tol;

    const RealDataReport report = run_real_data(cfg);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << report.to_key_value();

    const fs::path dir = prepare_out_dir(out);
    write_text(dir / "report.txt", report.to_key_value());
    std::ostringstream users, items;
    for (std::size_t i = 0; i < report.user_ids.size(); ++i)
        users << i << '\t' << report.user_ids[i] << '\n';
    for (std::size_t i = 0; i < report.item_ids.size(); ++i)
        items << i << '\t' << report.item_ids[i] << '\n';
    write_text(dir / "users.map", users.str());
    write_text(dir / "items.map", items.str());
    std::cout << "wrote " << (dir / "report.txt").string() << "\n";
    return 0;
}

struct SuiteStats {
    int violations = 0;
    int total = 0;
};

int run_theory_check(int trials, std::uint64_t seed_in) {
    const std::uint64_t seed = effective_seed(seed_in);
    std::mt19937_64 rng(seed);
    std::cout << "trials=" << trials << "\nseed=" << seed << "\nrng=" << kRngName << "\n";

    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto random_matrix = [&](int r, int c) {
        Matrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
        return m;
    };

    SuiteStats sandwich, contraction, triangle, extended, hoelder, annihilation, weak;
    for (int t = 0; t < trials; ++t) {
        const Matrix a = random_matrix(7, 5);
        const double f = frobenius_norm(a), nn = nuclear_norm(a);
        ++sandwich.total;
        if (!(f <= nn + 1e-9 && nn <= std::sqrt(5.0) * f + 1e-9)) ++sandwich.violations;

        const int s = 1 + static_cast<int>(rng() % 5);
        const ActiveDecomposition dec = decompose_active(a, s);
        ++contraction.total;
        const Matrix proj = dec.p_plus * (dec.p_plus.transpose() * a);
        if (!(proj.norm() <= a.norm() + 1e-9)) ++contraction.violations;

        const Matrix bp = random_matrix(7, 5);
        ++triangle.total;
        if (!check_triangle_property(dec, bp).pass) ++triangle.violations;

        ++extended.total;
        const double lhs = nuclear_norm(a) - nuclear_norm(bp);
        const double rhs = omega_plus(dec, bp - a) - omega_minus(dec, bp - a) +
                           2.0 * nuclear_norm(dec.b_minus);
        if (!(lhs <= rhs + 1e-9)) ++extended.violations;

        ++hoelder.total;
        if (!check_hoelder(a, bp)) ++hoelder.violations;

        ++annihilation.total;
        if (!(omega_plus(dec, dec.b_minus) <= 1e-9)) ++annihilation.violations;

        ++weak.total;
        std::vector<double> sv(6);
        std::uniform_real_distribution<double> mag(0.0, 5.0);
        for (double& v : sv) v = mag(rng);
        bool ok = true;
        for (double r : {0.1, 0.3, 0.5, 0.7, 0.9})
            for (double sigma : {0.01, 0.1, 1.0, 10.0}) ok &= weak_sparsity_bounds(sv, r, sigma).holds;
        if (!ok) ++weak.violations;
    }

    int bad = 0;
    const auto print = [&](const char* name, const SuiteStats& s) {
        std::cout << name << ": " << (s.total - s.violations) << "/" << s.total << " ok\n";
        bad += s.violations;
    };
    print("norm_sandwich", sandwich);
    print("projection_contraction", contraction);
    print("triangle_property", triangle);
    print("extended_triangle", extended);
    print("hoelder_dual", hoelder);
    print("omega_plus_annihilation", annihilation);
    print("weak_sparsity", weak);
    std::cout << (bad == 0 ? "all invariant suites passed\n" : "violations detected\n");
    return bad == 0 ? 0 : 2;
}

int run_prox_check(int matrices, std::uint64_t seed_in) {
    const std::uint64_t seed = effective_seed(seed_in);
    std::mt19937_64 rng(seed);
    std::cout << "matrices=" << matrices << "\nseed=" << seed << "\n";
    std::normal_distribution<double> gauss(0.0, 1.0);

    int sigma_bad = 0, perturb_bad = 0;
    std::normal_distribution<double> small(0.0, 0.1);
    for (int t = 0; t < matrices; ++t) {
        Matrix w(10, 8);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 8; ++j) w(i, j) = gauss(rng);
        for (double gamma : {0.0, 0.1, 1.0, 10.0}) {
            const Matrix b = prox_nuclear(w, gamma);
            const Vector sw = svd_thin(w).singular_values;
            const Vector sb = svd_thin(b).singular_values;
            for (Eigen::Index k = 0; k < sw.size(); ++k)
                if (std::abs(sb(k) - std::max(sw(k) - gamma, 0.0)) > 1e-8) ++sigma_bad;

            const double obj = gamma * sb.sum() + 0.5 * (b - w).squaredNorm();
            for (int r = 0; r < 50; ++r) {
                Matrix delta(10, 8);
                for (int i = 0; i < 10; ++i)
                    for (int j = 0; j < 8; ++j) delta(i, j) = small(rng);
                const Matrix cand = b + delta;
                const double cand_obj =
                    gamma * svd_thin(cand).singular_values.sum() + 0.5 * (cand - w).squaredNorm();
                if (obj > cand_obj + 1e-12) ++perturb_bad;
            }
        }
    }
    std::cout << "singular_value_identity_violations=" << sigma_bad << "\n"
              << "perturbation_optimality_violations=" << perturb_bad << "\n";
    return (sigma_bad == 0 && perturb_bad == 0) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust nuclear-norm penalized matrix completion"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    std::string sim_losses = "huber:1.345,quadratic";
    CLI::App* simulate = app.add_subcommand("simulate", "error curves over a sample-size grid");
    add_common_flags(simulate, sim_flags);
    simulate->add_option("--losses", sim_losses, "comma list: huber[:KAPPA], quadratic, absolute");

    CommonFlags size_flags;
    std::string sizes = "30,50,80";
    std::string size_losses = "huber:1.345";
    CLI::App* size_study = app.add_subcommand("size-study", "error curves across problem sizes");
    add_common_flags(size_study, size_flags, false);
    size_study->add_option("--sizes", sizes, "comma list of square sizes");
    size_study->add_option("--losses", size_losses, "losses per size");

    CommonFlags cmp_flags;
    bool corrupted = false;
    double corruption_fraction = 0.05, corruption_magnitude = 0.0;
    CLI::App* compare = app.add_subcommand("compare-lrps",
                                           "huber vs low-rank+sparse on identical data");
    add_common_flags(compare, cmp_flags);
    compare->add_flag("--corrupted", corrupted, "add sparse corruptions to the observations");
    compare->add_option("--corruption-fraction", corruption_fraction, "corrupted share of samples");
    compare->add_option("--corruption-magnitude", corruption_magnitude,
                        "corruption size (default eta)");

    std::string ratings;
    int n_train = 0, rd_max_iter = 6000;
    double rd_kappa = 2.0, rd_eta = 5.0, rd_lambda = 0.0, rd_fp_tol = 0.0;
    std::string rd_rule = "one-over-sqrt-n", rd_out = "results";
    std::uint64_t rd_seed = 42;
    CLI::App* real = app.add_subcommand("real-data", "ratings-file pipeline with test error");
    real->add_option("--ratings", ratings, "ratings file (tab or :: separated)")->required();
    real->add_option("--n-train", n_train, "training set size")->required()
        ->check(CLI::PositiveNumber);
    real->add_option("--max-iter", rd_max_iter, "iteration budget")->check(CLI::PositiveNumber);
    real->add_option("--kappa", rd_kappa, "huber knot")->check(CLI::PositiveNumber);
    real->add_option("--eta", rd_eta, "rating scale bound")->check(CLI::PositiveNumber);
    real->add_option("--lambda-rule", rd_rule, "paper-sim | one-over-sqrt-n | explicit");
    real->add_option("--lambda", rd_lambda, "penalty for --lambda-rule explicit");
    real->add_option("--fp-tol", rd_fp_tol, "fixed-point early-stop tolerance");
    real->add_option("--seed", rd_seed, "split seed (ROBUSTMC_SEED overrides)");
    real->add_option("--out", rd_out, "output directory");

    int trials = 1000;
    std::uint64_t theory_seed = 7;
    CLI::App* theory = app.add_subcommand("theory-check", "run the invariant suites");
    theory->add_option("--trials", trials, "instances per suite")->check(CLI::PositiveNumber);
    theory->add_option("--seed", theory_seed, "seed (ROBUSTMC_SEED overrides)");

    int matrices = 100;
    std::uint64_t prox_seed = 7;
    CLI::App* prox = app.add_subcommand("prox-check", "singular-value thresholding self-check");
    prox->add_option("--matrices", matrices, "number of random instances")
        ->check(CLI::PositiveNumber);
    prox->add_option("--seed", prox_seed, "seed (ROBUSTMC_SEED overrides)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;  // 0 covers --help/--version
    }

    try {
        if (simulate->parsed()) return run_simulate(sim_flags, sim_losses);
        if (size_study->parsed()) return run_size_study(size_flags, sizes, size_losses);
        if (compare->parsed())
            return run_compare(cmp_flags, corrupted, corruption_fraction, corruption_magnitude);
        if (real->parsed())
            return run_real(ratings, n_train, rd_max_iter, rd_kappa, rd_eta, rd_rule, rd_lambda,
                            rd_seed, rd_fp_tol, rd_out);
        if (theory->parsed()) return run_theory_check(trials, theory_seed);
        if (prox->parsed()) return run_prox_check(matrices, prox_seed);
    } catch (const NumericError& err) {
        std::cerr << "numeric error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
