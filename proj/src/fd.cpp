#include "crf/fd.h"

#include <cmath>

#include "crf/errors.h"

namespace crf {

namespace {

/// Evaluate f after shifting real coordinate indices (2i = x_i, 2i+1 = y_i).
cd shifted_eval(const std::function<cd(const std::vector<cd>&)>& f,
                const std::vector<cd>& coords, Chart chart, int r1, double d1, int r2,
                double d2) {
    std::vector<cd> q = coords;
    auto bump = [&q](int r, double d) {
        const int i = r / 2;
        if (r % 2 == 0) {
            q[i] += d;
        } else {
            q[i] += cd(0.0, d);
        }
    };
    bump(r1, d1);
    if (r2 >= 0) bump(r2, d2);
    if (!chart_contains(chart, q)) {
        throw StencilOutOfDomain("finite-difference stencil left the chart domain");
    }
    return f(q);
}

}  // namespace

Eigen::MatrixXcd complex_hessian(const std::function<cd(const std::vector<cd>&)>& f,
                                 const std::vector<cd>& coords, Chart chart, double h) {
    const int n = static_cast<int>(coords.size());
    const int m = 2 * n;
    if (!chart_contains(chart, coords)) {
        throw StencilOutOfDomain("complex_hessian: base point is outside the chart");
    }
    const cd f0 = f(coords);

    // Real second derivatives d^2 f / dr_a dr_b, a <= b, by 4th-order central
    // stencils (pure: 5-point; mixed: tensor product of 4-point first
    // derivatives).
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};
    const double wgt[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
    Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        cd acc = -30.0 * f0;
        acc += 16.0 * shifted_eval(f, coords, chart, a, h, -1, 0.0);
        acc += 16.0 * shifted_eval(f, coords, chart, a, -h, -1, 0.0);
        acc -= shifted_eval(f, coords, chart, a, 2.0 * h, -1, 0.0);
        acc -= shifted_eval(f, coords, chart, a, -2.0 * h, -1, 0.0);
        d2(a, a) = acc / (12.0 * h * h);
        for (int b = a + 1; b < m; ++b) {
            cd mix = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    mix += wgt[i] * wgt[j] *
                           shifted_eval(f, coords, chart, a, off[i] * h, b, off[j] * h);
                }
            }
            d2(a, b) = mix / (h * h);
            d2(b, a) = d2(a, b);
        }
    }

    Eigen::MatrixXcd hess(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cd re = d2(2 * i, 2 * j) + d2(2 * i + 1, 2 * j + 1);
            const cd im = d2(2 * i, 2 * j + 1) - d2(2 * i + 1, 2 * j);
            hess(i, j) = 0.25 * (re + cd(0.0, 1.0) * im);
        }
    }
    return hess;
}

HermitianForm chern_ricci_fd(const MetricField& field, const ComplexPoint& p, double t,
                             double h) {
    const Chart chart = p.chart;
    auto u = [&field, chart, t](const std::vector<cd>& z) {
        ComplexPoint q{z, chart};
        const double det = det_g(field.eval(q, t));
        if (det <= 0.0) {
            throw NonPositiveDeterminant("chern_ricci_fd: det g <= 0 at a stencil point");
        }
        return cd(std::log(det), 0.0);
    };
    HermitianForm ric{(-complex_hessian(u, p.coords, chart, h)).eval()};
    ric.symmetrize();
    return ric;
}

double gauduchon_defect_fd(const MetricField& field, const ComplexPoint& p, double t,
                           double h) {
    const Chart chart = p.chart;
    auto entry = [&field, chart, t](int r, int c) {
        return [&field, chart, t, r, c](const std::vector<cd>& z) {
            return field.eval(ComplexPoint{z, chart}, t).g(r, c);
        };
    };
    const Eigen::MatrixXcd h11 = complex_hessian(entry(0, 0), p.coords, chart, h);
    const Eigen::MatrixXcd h22 = complex_hessian(entry(1, 1), p.coords, chart, h);
    const Eigen::MatrixXcd h12 = complex_hessian(entry(0, 1), p.coords, chart, h);
    const Eigen::MatrixXcd h21 = complex_hessian(entry(1, 0), p.coords, chart, h);
    const cd s = h22(0, 0) + h11(1, 1) - h12(1, 0) - h21(0, 1);
    return std::abs(s);
}

}  // namespace crf
