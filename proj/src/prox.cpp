#include "robustmc/prox.hpp"

#include <cmath>

namespace robustmc {

SvdFactors svd_thin(const Matrix& a) {
    if (!a.allFinite()) throw NumericError("svd of a non-finite matrix");
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SvdFactors{svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
}

double soft_threshold(double x, double gamma) {
    if (gamma < 0) throw ArgumentError("soft_threshold: gamma must be nonnegative");
    if (x > gamma) return x - gamma;
    if (x < -gamma) return x + gamma;
    return 0.0;
}

Matrix prox_nuclear(const Matrix& w, double gamma) {
    if (gamma < 0) throw ArgumentError("prox_nuclear: gamma must be nonnegative");
    if (gamma == 0.0) {
        if (!w.allFinite()) throw NumericError("prox_nuclear: non-finite input");
        return w;
    }
    SvdFactors f = svd_thin(w);
    Vector s = f.singular_values;
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = soft_threshold(s(i), gamma);
    return f.u * s.asDiagonal() * f.vt;
}

Matrix project_box(const Matrix& b, double eta) {
    if (eta <= 0) throw ArgumentError("project_box: eta must be positive");
    return b.cwiseMax(-eta).cwiseMin(eta);
}

}  // namespace robustmc
