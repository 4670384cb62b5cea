#pragma once

#include <vector>

#include "crf/models.h"

namespace crf {

/// Node-wise Hermitian 2x2 field on a periodic 4-dimensional grid: entries
/// g_11, g_22 (real) and g_12 (complex, g_21 = conj).
struct GridHermitian {
    std::vector<double> h11, h22;
    std::vector<cd> h12;
};

/// Periodic 4th-order central first derivative along one axis of the unit cell
/// grid (spacing 1/G per axis).
std::vector<double> grid_deriv1(int G, const std::vector<double>& f, int axis);

/// Complex Hessian d_i d_j-bar f on the grid, with z1 = x0 + i x1 and
/// z2 = x2 + i x3; pure second derivatives by the 5-point 4th-order stencil,
/// mixed ones by composed first derivatives.
GridHermitian grid_complex_hessian(int G, const std::vector<double>& f);

/// Background data of the torus Monge-Ampere flow: omega_0 = flat + i ddbar psi
/// on the unit-lattice torus, its determinant field and the Ricci potential F
/// with the normalization sum e^F det g0 = sum det g0.
struct TorusBackground {
    int G = 0;
    std::vector<double> psi;
    GridHermitian g0;
    std::vector<double> det0;
    std::vector<double> F;
    double cell_w = 0.0;  ///< Euclidean volume of one grid cell
};

TorusBackground make_torus_background(int G, const std::vector<double>& psi);

/// The Ricci potential: F = log(mean det g0) - log det g0 (same normalization
/// as TorusBackground::F).
std::vector<double> ricci_potential_F(int G, const std::vector<double>& det0);

/// phi-potential metric g_phi = g0 + Hess phi; throws PositivityLost if any
/// node fails the positive-definiteness minor test.
GridHermitian metric_of_potential(const TorusBackground& bg,
                                  const std::vector<double>& phi);

std::vector<double> det_field(const GridHermitian& g);

/// Right-hand side phi-dot = log(det g_phi / det g0) - F.
std::vector<double> torus_phi_dot(const TorusBackground& bg,
                                  const std::vector<double>& phi);

/// Mabuchi energy Mab = int (log(w_phi^2/w_0^2) - F) w_phi^2 + int F w_0^2,
/// discretized with int f w^2 = 8 sum f det g cell_w.
double mabuchi_energy(const TorusBackground& bg, const std::vector<double>& phi);

/// The closed-form Mabuchi derivative -2 int i d(phi-dot) ^ dbar(phi-dot) ^ w_phi
/// (always <= 0), discretized in the pre-integration-by-parts form
/// int phi-dot d/dt(w_phi^2) consistent with the discrete energy.
double mabuchi_derivative_formula(const TorusBackground& bg,
                                  const std::vector<double>& phi);

/// Direct quadrature of -2 int i d(phi-dot) ^ dbar(phi-dot) ^ w_phi (manifestly
/// <= 0); differs from mabuchi_derivative_formula by the spatial truncation.
double mabuchi_gradient_integral(const TorusBackground& bg,
                                 const std::vector<double>& phi);

double torus_volume(const TorusBackground& bg, const std::vector<double>& phi);

struct TorusStepRecord {
    double t = 0.0;
    double volume = 0.0;
    double sup_phidot = 0.0;
    double mabuchi = 0.0;
};

/// Mabuchi derivative probe at one time (EnergyReport of the functionals).
struct EnergyReport {
    double t = 0.0;
    double mabuchi = 0.0;
    double derivative_formula = 0.0;
    double derivative_fd = 0.0;
    double volume = 0.0;
};

struct TorusFlowResult {
    std::vector<TorusStepRecord> steps;
    std::vector<EnergyReport> probes;
    std::vector<double> phi_final;
    double final_sup_phidot = 0.0;
    double final_dt = 0.0;
};

/// RK4 integration of the parabolic Monge-Ampere flow from phi0 to t_end.
/// On PositivityLost the step is rejected and dt halved (at most 10 times);
/// throws Instability if the Mabuchi energy increases by more than 1e-9.
/// probe_times request derivative-identity probes near those times.
TorusFlowResult evolve_torus_ma(const TorusBackground& bg, std::vector<double> phi0,
                                double t_end, double dt,
                                const std::vector<double>& probe_times = {});

}  // namespace crf
