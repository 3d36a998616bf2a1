#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "robustmc/harness.hpp"

namespace robustmc {

namespace {

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    if (line.find("::") != std::string::npos) {
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = line.find("::", pos);
            if (next == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, next - pos));
            pos = next + 2;
        }
    } else {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) fields.push_back(tok);
    }
    return fields;
}

long long parse_int_field(const std::string& s, long lineno, const char* what) {
    long long value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(std::string("malformed ") + what + " '" + s + "'", lineno);
    return value;
}

double parse_real_field(const std::string& s, long lineno, const char* what) {
    double value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(value))
        throw ParseError(std::string("malformed ") + what + " '" + s + "'", lineno);
    return value;
}

struct PairHash {
    std::size_t operator()(const std::pair<int, int>& c) const {
        return std::hash<long long>()((static_cast<long long>(c.first) << 32) ^ c.second);
    }
};

}  // namespace

RatingsData parse_ratings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ratings file: " + path);

    RatingsData data;
    std::unordered_map<long long, int> user_index, item_index;
    std::unordered_set<std::pair<int, int>, PairHash> seen;

    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::vector<std::string> fields = split_record(line);
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("expected 'user item rating [timestamp]', got " +
                                 std::to_string(fields.size()) + " field(s)",
                             lineno);
        const long long user = parse_int_field(fields[0], lineno, "user id");
        const long long item = parse_int_field(fields[1], lineno, "item id");
        const double rating = parse_real_field(fields[2], lineno, "rating");

        auto [uit, unew] = user_index.try_emplace(user, static_cast<int>(data.user_ids.size()));
        if (unew) data.user_ids.push_back(user);
        auto [iit, inew] = item_index.try_emplace(item, static_cast<int>(data.item_ids.size()));
        if (inew) data.item_ids.push_back(item);

        const std::pair<int, int> cell{uit->second, iit->second};
        if (!seen.insert(cell).second) {
            ++data.duplicates_dropped;
            continue;
        }
        if (rating < 1.0 || rating > 5.0) ++data.out_of_range_ratings;
        data.obs.entries.push_back({cell.first, cell.second, rating});
    }

    data.obs.p = static_cast<int>(data.user_ids.size());
    data.obs.q = static_cast<int>(data.item_ids.size());
    if (data.obs.n() == 0) throw ParseError("ratings file holds no records", lineno);
    if (data.duplicates_dropped > 0)
        data.warnings.push_back("dropped " + std::to_string(data.duplicates_dropped) +
                                " duplicate (user,item) record(s), first kept");
    if (data.out_of_range_ratings > 0)
        data.warnings.push_back(std::to_string(data.out_of_range_ratings) +
                                " rating(s) outside [1,5]");
    return data;
}

std::pair<ObservationSet, ObservationSet> split_train_test(const ObservationSet& obs, int n_train,
                                                           std::uint64_t seed) {
    obs.validate();
    const int n = obs.n();
    if (n_train < 0 || n_train > n)
        throw ArgumentError("split_train_test: n_train must lie in [0, n]");

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }

    ObservationSet train{{}, obs.p, obs.q}, test{{}, obs.p, obs.q};
    train.entries.reserve(static_cast<std::size_t>(n_train));
    test.entries.reserve(static_cast<std::size_t>(n - n_train));
    for (int i = 0; i < n; ++i) {
        const Entry& e = obs.entries[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        (i < n_train ? train : test).entries.push_back(e);
    }
    return {std::move(train), std::move(test)};
}

double test_error(const Matrix& estimate, const ObservationSet& test) {
    if (estimate.rows() != test.p || estimate.cols() != test.q)
        throw DimensionError("test_error: estimate does not match observation dimensions");
    test.validate();
    if (test.n() == 0) throw ArgumentError("test_error: empty test set");
    double sum = 0.0;
    for (const Entry& e : test.entries) {
        const double d = e.value - estimate(e.row, e.col);
        sum += d * d;
    }
    return sum / test.n();
}

RealDataReport run_real_data(const RealDataConfig& cfg) {
    RatingsData data = parse_ratings(cfg.path);
    if (cfg.n_train <= 0 || cfg.n_train > data.obs.n())
        throw ArgumentError("run_real_data: n_train must lie in [1, n]");
    if (cfg.n_train == data.obs.n())
        throw ArgumentError("run_real_data: no observations left for the test set");

    auto [train, test] = split_train_test(data.obs, cfg.n_train, cfg.seed);

    SolverConfig scfg;
    scfg.max_iter = cfg.max_iter;
    scfg.eta = cfg.eta;
    scfg.fixed_point_tol = cfg.fixed_point_tol;
    switch (cfg.lambda_rule) {
        case LambdaRule::paper_sim:
            scfg.lambda = lambda_paper_sim(data.obs.p, data.obs.q, cfg.n_train);
            break;
        case LambdaRule::one_over_sqrt_n:
            scfg.lambda = 1.0 / std::sqrt(static_cast<double>(cfg.n_train));
            break;
        case LambdaRule::explicit_value: scfg.lambda = cfg.lambda_explicit; break;
    }

    const Matrix init = observed_entry_matrix(train);
    const SolveResult res = solve(LossSpec::huber(cfg.kappa), train, scfg, init);

    RealDataReport report;
    report.config = cfg;
    report.p = data.obs.p;
    report.q = data.obs.q;
    report.n = data.obs.n();
    report.n_test = test.n();
    report.lambda = scfg.lambda;
    report.iterations_run = res.iterations_run;
    report.final_fixed_point_residual = res.final_fixed_point_residual;
    report.test_err = test_error(res.estimate.data, test);
    report.user_ids = std::move(data.user_ids);
    report.item_ids = std::move(data.item_ids);
    report.warnings = std::move(data.warnings);
    return report;
}

std::string RealDataReport::to_key_value() const {
    std::ostringstream out;
    out << "ratings_path=" << config.path << '\n'
        << "p=" << p << '\n'
        << "q=" << q << '\n'
        << "n=" << n << '\n'
        << "n_train=" << config.n_train << '\n'
        << "n_test=" << n_test << '\n'
        << "kappa=" << format_double(config.kappa) << '\n'
        << "eta=" << format_double(config.eta) << '\n'
        << "lambda_rule=" << lambda_rule_name(config.lambda_rule) << '\n'
        << "lambda=" << format_double(lambda) << '\n'
        << "max_iter=" << config.max_iter << '\n'
        << "fixed_point_tol=" << format_double(config.fixed_point_tol) << '\n'
        << "seed=" << config.seed << '\n'
        << "rng=" << kRngName << '\n'
        << "iterations_run=" << iterations_run << '\n'
        << "final_fixed_point_residual=" << format_double(final_fixed_point_residual) << '\n'
        << "test_error=" << format_double(test_err) << '\n';
    return out.str();
}

}  // namespace robustmc
