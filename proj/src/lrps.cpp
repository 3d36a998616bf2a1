#include "robustmc/lrps.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace robustmc {

namespace {

// Observed support, deduplicated and sorted; S lives on these cells only.
struct Support {
    std::vector<std::pair<int, int>> cells;
    Eigen::MatrixXi index;  // cell -> position in cells, -1 elsewhere

    explicit Support(const ObservationSet& obs) : index(Eigen::MatrixXi::Constant(obs.p, obs.q, -1)) {
        cells.reserve(obs.entries.size());
        for (const Entry& e : obs.entries) cells.emplace_back(e.row, e.col);
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        for (std::size_t k = 0; k < cells.size(); ++k) index(cells[k].first, cells[k].second) = static_cast<int>(k);
    }
};

Vector sparse_gradient_at(const Matrix& g, const Support& supp) {
    Vector out(static_cast<Eigen::Index>(supp.cells.size()));
    for (std::size_t k = 0; k < supp.cells.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = g(supp.cells[k].first, supp.cells[k].second);
    return out;
}

Matrix densify(const Vector& s, const Support& supp, int p, int q) {
    Matrix out = Matrix::Zero(p, q);
    for (std::size_t k = 0; k < supp.cells.size(); ++k)
        out(supp.cells[k].first, supp.cells[k].second) = s(static_cast<Eigen::Index>(k));
    return out;
}

// Quadratic-loss gradient of the combined fit, dense over the support.
Matrix combined_gradient(const ObservationSet& obs, const Matrix& l, const Vector& s,
                         const Support& supp) {
    Matrix g = Matrix::Zero(obs.p, obs.q);
    for (const Entry& e : obs.entries) {
        const double fit = l(e.row, e.col) + s(supp.index(e.row, e.col));
        g(e.row, e.col) -= 2.0 * (e.value - fit);
    }
    g /= obs.n();
    return g;
}

double fit_risk(const ObservationSet& obs, const Matrix& l, const Vector& s, const Support& supp) {
    double sum = 0.0;
    for (const Entry& e : obs.entries) {
        const double r = e.value - l(e.row, e.col) - s(supp.index(e.row, e.col));
        sum += r * r;
    }
    return sum / obs.n();
}

double nuclear_of(const Matrix& a) { return svd_thin(a).singular_values.sum(); }

}  // namespace

LrpsResult solve_lrps(const ObservationSet& obs, double lambda1, double lambda2,
                      const SolverConfig& cfg) {
    if (lambda1 < 0 || lambda2 < 0) throw ArgumentError("solve_lrps: penalties must be nonnegative");
    if (cfg.l_init <= 0) throw ArgumentError("solve_lrps: l_init must be positive");
    if (cfg.beta <= 1) throw ArgumentError("solve_lrps: beta must exceed 1");
    if (cfg.max_iter < 1) throw ArgumentError("solve_lrps: max_iter must be positive");
    if (cfg.box_projection && cfg.eta <= 0)
        throw ArgumentError("solve_lrps: box projection requires eta > 0");
    obs.validate();
    if (obs.n() == 0) throw ArgumentError("solve_lrps: empty observation set");

    const Support supp(obs);
    const Eigen::Index m = static_cast<Eigen::Index>(supp.cells.size());

    Matrix l = Matrix::Zero(obs.p, obs.q);
    Vector s = Vector::Zero(m);
    Matrix vl = l;
    Vector vs = s;
    double curvature = cfg.l_init;

    double obj = fit_risk(obs, l, s, supp) + (lambda1 > 0 ? lambda1 * nuclear_of(l) : 0.0) +
                 lambda2 * s.cwiseAbs().sum();

    LrpsResult res;
    res.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
    double accepted_curvature = curvature;

    for (int t = 1; t <= cfg.max_iter; ++t) {
        const Matrix l_prev = l;
        const Vector s_prev = s;
        const double obj_prev = obj;
        const Matrix grad_prev = combined_gradient(obs, l_prev, s_prev, supp);
        const Vector grad_prev_s = sparse_gradient_at(grad_prev, supp);
        const Matrix grad_v = combined_gradient(obs, vl, vs, supp);
        const Vector grad_v_s = sparse_gradient_at(grad_v, supp);

        Matrix l_cand;
        Vector s_cand(m);
        double obj_cand = 0.0;
        double delta = 0.0;
        while (true) {
            double l_nuclear = 0.0;
            if (lambda1 > 0) {
                SvdFactors f = svd_thin(vl - grad_v / curvature);
                Vector sv = f.singular_values;
                for (Eigen::Index i = 0; i < sv.size(); ++i) {
                    sv(i) = soft_threshold(sv(i), lambda1 / curvature);
                    l_nuclear += sv(i);
                }
                l_cand = f.u * sv.asDiagonal() * f.vt;
            } else {
                l_cand = vl - grad_v / curvature;
            }
            for (Eigen::Index k = 0; k < m; ++k)
                s_cand(k) = soft_threshold(vs(k) - grad_v_s(k) / curvature, lambda2 / curvature);
            if (cfg.box_projection) {
                l_cand = project_box(l_cand, cfg.eta);
                if (lambda1 > 0) l_nuclear = nuclear_of(l_cand);
                s_cand = s_cand.cwiseMax(-cfg.eta).cwiseMin(cfg.eta);
            }

            obj_cand = fit_risk(obs, l_cand, s_cand, supp) + lambda1 * l_nuclear +
                       lambda2 * s_cand.cwiseAbs().sum();
            if (!std::isfinite(obj_cand)) throw NumericError("solve_lrps: non-finite objective", t);

            const Matrix dl = l_cand - l_prev;
            const Vector ds = s_cand - s_prev;
            delta = obj_cand - obj_prev - grad_prev.cwiseProduct(dl).sum() -
                    grad_prev_s.dot(ds) - 0.5 * curvature * (dl.squaredNorm() + ds.squaredNorm());
            if (delta <= cfg.bt_tolerance) break;
            curvature *= cfg.beta;
            if (curvature > 1e18) throw NumericError("solve_lrps: backtracking diverged", t);
        }
        accepted_curvature = curvature;

        const double mom = static_cast<double>(t) / (t + 3);
        vl = l_cand + mom * (l_cand - l_prev);
        vs = s_cand + mom * (s_cand - s_prev);
        l = std::move(l_cand);
        s = std::move(s_cand);
        obj = obj_cand;
        res.objective_trace.push_back(obj);
        res.accepted_deltas.push_back(delta);
        res.iterations_run = t;
    }

    // Blockwise fixed-point residuals at the last accepted curvature.
    {
        const Matrix g = combined_gradient(obs, l, s, supp);
        const Vector gs = sparse_gradient_at(g, supp);
        const Matrix l_step = prox_nuclear(l - g / accepted_curvature, lambda1 / accepted_curvature);
        res.fixed_point_residual_l = (l - l_step).norm();
        double sq = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double step =
                soft_threshold(s(k) - gs(k) / accepted_curvature, lambda2 / accepted_curvature);
            sq += (s(k) - step) * (s(k) - step);
        }
        res.fixed_point_residual_s = std::sqrt(sq);
    }

    res.final_step_curvature = accepted_curvature;
    res.l_hat = ParameterMatrix{std::move(l), cfg.eta};
    res.s_hat = ParameterMatrix{densify(s, supp, obs.p, obs.q), cfg.eta};
    return res;
}

}  // namespace robustmc
