#include "crf/torus_flow.h"

#include <algorithm>
#include <cmath>
#include <deque>

#include "crf/errors.h"

namespace crf {

namespace {

template <typename Fn>
void for_each_node(int G, Fn&& fn) {
    int idx = 0;
    int g[4];
    for (g[0] = 0; g[0] < G; ++g[0])
        for (g[1] = 0; g[1] < G; ++g[1])
            for (g[2] = 0; g[2] < G; ++g[2])
                for (g[3] = 0; g[3] < G; ++g[3]) fn(idx++, g);
}

std::vector<double> grid_deriv2(int G, const std::vector<double>& f, int axis) {
    std::vector<double> out(f.size());
    const double inv = static_cast<double>(G) * G / 12.0;
    const int s[4] = {G * G * G, G * G, G, 1};
    const int sa = s[axis];
    for_each_node(G, [&](int idx, const int* g) {
        const int c = g[axis];
        const int ip1 = idx + ((c + 1) % G - c) * sa;
        const int ip2 = idx + ((c + 2) % G - c) * sa;
        const int im1 = idx + ((c - 1 + G) % G - c) * sa;
        const int im2 = idx + ((c - 2 + G) % G - c) * sa;
        out[idx] =
            (-f[im2] + 16.0 * f[im1] - 30.0 * f[idx] + 16.0 * f[ip1] - f[ip2]) * inv;
    });
    return out;
}

}  // namespace

std::vector<double> grid_deriv1(int G, const std::vector<double>& f, int axis) {
    std::vector<double> out(f.size());
    const double inv = static_cast<double>(G) / 12.0;
    const int s[4] = {G * G * G, G * G, G, 1};
    const int sa = s[axis];
    for_each_node(G, [&](int idx, const int* g) {
        const int c = g[axis];
        const int ip1 = idx + ((c + 1) % G - c) * sa;
        const int ip2 = idx + ((c + 2) % G - c) * sa;
        const int im1 = idx + ((c - 1 + G) % G - c) * sa;
        const int im2 = idx + ((c - 2 + G) % G - c) * sa;
        out[idx] = (f[im2] - 8.0 * f[im1] + 8.0 * f[ip1] - f[ip2]) * inv;
    });
    return out;
}

GridHermitian grid_complex_hessian(int G, const std::vector<double>& f) {
    const std::vector<double> d00 = grid_deriv2(G, f, 0);
    const std::vector<double> d11 = grid_deriv2(G, f, 1);
    const std::vector<double> d22 = grid_deriv2(G, f, 2);
    const std::vector<double> d33 = grid_deriv2(G, f, 3);
    const std::vector<double> d0 = grid_deriv1(G, f, 0);
    const std::vector<double> d1 = grid_deriv1(G, f, 1);
    const std::vector<double> d02 = grid_deriv1(G, d0, 2);
    const std::vector<double> d03 = grid_deriv1(G, d0, 3);
    const std::vector<double> d12 = grid_deriv1(G, d1, 2);
    const std::vector<double> d13 = grid_deriv1(G, d1, 3);
    const size_t n = f.size();
    GridHermitian h;
    h.h11.resize(n);
    h.h22.resize(n);
    h.h12.resize(n);
    for (size_t i = 0; i < n; ++i) {
        h.h11[i] = 0.25 * (d00[i] + d11[i]);
        h.h22[i] = 0.25 * (d22[i] + d33[i]);
        h.h12[i] = 0.25 * cd(d02[i] + d13[i], d03[i] - d12[i]);
    }
    return h;
}

std::vector<double> det_field(const GridHermitian& g) {
    std::vector<double> d(g.h11.size());
    for (size_t i = 0; i < d.size(); ++i) {
        d[i] = g.h11[i] * g.h22[i] - std::norm(g.h12[i]);
    }
    return d;
}

std::vector<double> ricci_potential_F(int G, const std::vector<double>& det0) {
    double mean = 0.0;
    for (double d : det0) mean += d;
    mean /= det0.size();
    std::vector<double> F(det0.size());
    for (size_t i = 0; i < F.size(); ++i) F[i] = std::log(mean) - std::log(det0[i]);
    return F;
}

TorusBackground make_torus_background(int G, const std::vector<double>& psi) {
    TorusBackground bg;
    bg.G = G;
    bg.psi = psi;
    bg.g0 = grid_complex_hessian(G, psi);
    for (size_t i = 0; i < bg.g0.h11.size(); ++i) {
        bg.g0.h11[i] += 1.0;
        bg.g0.h22[i] += 1.0;
    }
    bg.det0 = det_field(bg.g0);
    for (double d : bg.det0) {
        if (d <= 0.0) {
            throw PositivityLost("make_torus_background: omega_0 not positive on grid");
        }
    }
    bg.F = ricci_potential_F(G, bg.det0);
    bg.cell_w = 1.0 / static_cast<double>(psi.size());
    return bg;
}

GridHermitian metric_of_potential(const TorusBackground& bg,
                                  const std::vector<double>& phi) {
    GridHermitian g = grid_complex_hessian(bg.G, phi);
    for (size_t i = 0; i < g.h11.size(); ++i) {
        g.h11[i] += bg.g0.h11[i];
        g.h22[i] += bg.g0.h22[i];
        g.h12[i] += bg.g0.h12[i];
        if (g.h11[i] <= 0.0 || g.h11[i] * g.h22[i] - std::norm(g.h12[i]) <= 0.0) {
            throw PositivityLost("metric_of_potential: node metric not positive");
        }
    }
    return g;
}

std::vector<double> torus_phi_dot(const TorusBackground& bg,
                                  const std::vector<double>& phi) {
    const GridHermitian g = metric_of_potential(bg, phi);
    const std::vector<double> det = det_field(g);
    std::vector<double> rhs(phi.size());
    for (size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] = std::log(det[i] / bg.det0[i]) - bg.F[i];
    }
    return rhs;
}

double mabuchi_energy(const TorusBackground& bg, const std::vector<double>& phi) {
    const GridHermitian g = metric_of_potential(bg, phi);
    const std::vector<double> det = det_field(g);
    double acc = 0.0;
    for (size_t i = 0; i < det.size(); ++i) {
        acc += (std::log(det[i] / bg.det0[i]) - bg.F[i]) * det[i] + bg.F[i] * bg.det0[i];
    }
    return 8.0 * acc * bg.cell_w;
}

double mabuchi_derivative_formula(const TorusBackground& bg,
                                  const std::vector<double>& phi) {
    // The derivative -2 int i d(phi-dot) ^ dbar(phi-dot) ^ w_phi is discretized
    // in its pre-integration-by-parts form int phi-dot d/dt(w_phi^2): with the
    // same difference operators as the energy itself, the two sides of the
    // derivative identity then agree to the time-stencil error instead of the
    // spatial truncation error.
    const GridHermitian g = metric_of_potential(bg, phi);
    const std::vector<double> pd = torus_phi_dot(bg, phi);
    const GridHermitian hu = grid_complex_hessian(bg.G, pd);
    double acc = 0.0;
    for (size_t i = 0; i < pd.size(); ++i) {
        // d det g_phi along Hess(phi-dot), times (1 + phi-dot): the exact
        // continuous-time derivative of the discrete Mabuchi sum.
        const double ddet = hu.h11[i] * g.h22[i] + hu.h22[i] * g.h11[i] -
                            2.0 * std::real(std::conj(g.h12[i]) * hu.h12[i]);
        acc += (1.0 + pd[i]) * ddet;
    }
    return 8.0 * acc * bg.cell_w;
}

double mabuchi_gradient_integral(const TorusBackground& bg,
                                 const std::vector<double>& phi) {
    const GridHermitian g = metric_of_potential(bg, phi);
    const std::vector<double> pd = torus_phi_dot(bg, phi);
    const std::vector<double> d0 = grid_deriv1(bg.G, pd, 0);
    const std::vector<double> d1 = grid_deriv1(bg.G, pd, 1);
    const std::vector<double> d2 = grid_deriv1(bg.G, pd, 2);
    const std::vector<double> d3 = grid_deriv1(bg.G, pd, 3);
    double acc = 0.0;
    for (size_t i = 0; i < pd.size(); ++i) {
        const cd f1 = 0.5 * cd(d0[i], -d1[i]);
        const cd f2 = 0.5 * cd(d2[i], -d3[i]);
        // mixed(A, g) with A = f f^H: A11 g22 + A22 g11 - 2 Re(A12 g21)
        const double mixed = std::norm(f1) * g.h22[i] + std::norm(f2) * g.h11[i] -
                             2.0 * std::real(f1 * std::conj(f2) * std::conj(g.h12[i]));
        acc += mixed;
    }
    return -8.0 * acc * bg.cell_w;
}

double torus_volume(const TorusBackground& bg, const std::vector<double>& phi) {
    const std::vector<double> det = det_field(metric_of_potential(bg, phi));
    double acc = 0.0;
    for (double d : det) acc += d;
    return 8.0 * acc * bg.cell_w;
}

TorusFlowResult evolve_torus_ma(const TorusBackground& bg, std::vector<double> phi0,
                                double t_end, double dt,
                                const std::vector<double>& probe_times) {
    const size_t n = phi0.size();
    TorusFlowResult res;
    std::vector<double> phi = std::move(phi0);
    double t = 0.0;
    double mab_prev = mabuchi_energy(bg, phi);

    auto record = [&](const std::vector<double>& pd) {
        TorusStepRecord r;
        r.t = t;
        r.volume = torus_volume(bg, phi);
        r.sup_phidot = 0.0;
        for (double v : pd) r.sup_phidot = std::max(r.sup_phidot, std::abs(v));
        r.mabuchi = mabuchi_energy(bg, phi);
        res.steps.push_back(r);
        return r;
    };

    {
        const std::vector<double> pd = torus_phi_dot(bg, phi);
        record(pd);
    }

    size_t next_probe = 0;
    std::vector<size_t> pending_probes;  // step index at which the probe is centered
    std::deque<std::vector<double>> recent_phi;
    recent_phi.push_back(phi);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    int halvings = 0;
    while (t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - t);
        bool ok = true;
        try {
            k1 = torus_phi_dot(bg, phi);
            for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * step * k1[i];
            k2 = torus_phi_dot(bg, tmp);
            for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * step * k2[i];
            k3 = torus_phi_dot(bg, tmp);
            for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + step * k3[i];
            k4 = torus_phi_dot(bg, tmp);
            for (size_t i = 0; i < n; ++i) {
                tmp[i] = phi[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            // Validate the accepted state too.
            metric_of_potential(bg, tmp);
        } catch (const PositivityLost&) {
            ok = false;
        }
        if (!ok) {
            if (++halvings > 10) {
                throw PositivityLost("evolve_torus_ma: positivity lost after 10 halvings");
            }
            dt *= 0.5;
            continue;
        }
        phi.swap(tmp);
        t += step;

        const std::vector<double> pd = torus_phi_dot(bg, phi);
        const TorusStepRecord r = record(pd);
        if (r.mabuchi > mab_prev + 1e-9) {
            throw Instability("evolve_torus_ma: Mabuchi energy increased");
        }
        mab_prev = r.mabuchi;

        recent_phi.push_back(phi);
        if (recent_phi.size() > 5) recent_phi.pop_front();

        const size_t k = res.steps.size() - 1;
        if (next_probe < probe_times.size() && t >= probe_times[next_probe] && k >= 2) {
            pending_probes.push_back(k);
            ++next_probe;
        }
        // Finalize probes two steps after their center, so the time derivative
        // of the Mabuchi energy can use a centered 4th-order stencil around the
        // same state the closed-form expression is evaluated at.
        while (!pending_probes.empty() && k == pending_probes.front() + 2) {
            const size_t c = pending_probes.front();
            pending_probes.erase(pending_probes.begin());
            const std::vector<double>& phi_c = recent_phi[recent_phi.size() - 3];
            EnergyReport er;
            er.t = res.steps[c].t;
            er.mabuchi = res.steps[c].mabuchi;
            er.volume = res.steps[c].volume;
            er.derivative_formula = mabuchi_derivative_formula(bg, phi_c);
            const double hh = res.steps[c + 1].t - res.steps[c].t;
            er.derivative_fd =
                (-res.steps[c + 2].mabuchi + 8.0 * res.steps[c + 1].mabuchi -
                 8.0 * res.steps[c - 1].mabuchi + res.steps[c - 2].mabuchi) /
                (12.0 * hh);
            res.probes.push_back(er);
        }
    }

    res.final_dt = dt;
    res.phi_final = phi;
    const std::vector<double> pd = torus_phi_dot(bg, phi);
    for (double v : pd) res.final_sup_phidot = std::max(res.final_sup_phidot, std::abs(v));
    return res;
}

}  // namespace crf
