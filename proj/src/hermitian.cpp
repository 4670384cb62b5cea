#include "crf/hermitian.h"

#include "crf/errors.h"

namespace crf {

bool chart_contains(Chart chart, const std::vector<cd>& coords) {
    switch (chart) {
        case Chart::PuncturedCn: {
            double r2 = 0.0;
            for (const cd& z : coords) r2 += std::norm(z);
            return r2 > 0.0;
        }
        case Chart::HalfPlaneC:
            return coords.size() == 2 && coords[0].imag() > 0.0;
        case Chart::HalfPlaneCStar:
            return coords.size() == 2 && coords[0].imag() > 0.0 && std::norm(coords[1]) > 0.0;
        case Chart::TorusCell:
            return coords.size() == 2;
    }
    return false;
}

double HermitianForm::hermitian_defect() const {
    return (g - g.adjoint()).cwiseAbs().maxCoeff();
}

void HermitianForm::symmetrize() {
    g = 0.5 * (g + g.adjoint().eval());
}

double det_g(const HermitianForm& form) {
    Eigen::MatrixXcd h = 0.5 * (form.g + form.g.adjoint());
    return h.determinant().real();
}

bool is_positive(const HermitianForm& form) {
    Eigen::MatrixXcd h = 0.5 * (form.g + form.g.adjoint());
    const int n = form.dim();
    for (int k = 1; k <= n; ++k) {
        if (h.topLeftCorner(k, k).determinant().real() <= 0.0) return false;
    }
    return true;
}

double trace_with(const HermitianForm& g, const HermitianForm& gp) {
    if (!is_positive(g)) {
        throw SingularMetric("trace_with: base form is not positive definite");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.g);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12) {
        throw SingularMetric("trace_with: condition number exceeds 1e12");
    }
    return (g.g.inverse() * gp.g).trace().real();
}

double sup_distance(const HermitianForm& a, const HermitianForm& b) {
    return (a.g - b.g).cwiseAbs().maxCoeff();
}

}  // namespace crf
