#pragma once

#include <functional>

#include "crf/models.h"

namespace crf {

/// Complex Hessian H_{ij-bar} = d_i d_j-bar f of a scalar function of chart
/// coordinates, from central differences in the underlying real coordinates:
/// H_{ij-bar} = (1/4)[(f_{x_i x_j} + f_{y_i y_j}) + i (f_{x_i y_j} - f_{y_i x_j})].
/// Every stencil evaluation point must lie in the chart; otherwise throws
/// StencilOutOfDomain.
Eigen::MatrixXcd complex_hessian(const std::function<cd(const std::vector<cd>&)>& f,
                                 const std::vector<cd>& coords, Chart chart,
                                 double h = 1e-3);

/// Chern-Ricci form -d d-bar log det g of a metric field at (p, t) by finite
/// differences.  Throws NonPositiveDeterminant if det g <= 0 at any stencil
/// point and StencilOutOfDomain if the stencil leaves the chart.
HermitianForm chern_ricci_fd(const MetricField& field, const ComplexPoint& p, double t,
                             double h = 1e-3);

/// Gauduchon defect |d_1 d_1-bar g_22 + d_2 d_2-bar g_11 - d_2 d_1-bar g_12
/// - d_1 d_2-bar g_21| of a surface metric field at (p, t); zero exactly when
/// d d-bar omega = 0 at p.
double gauduchon_defect_fd(const MetricField& field, const ComplexPoint& p, double t,
                           double h = 1e-3);

}  // namespace crf
