#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "crf/errors.h"
#include "crf/functionals.h"
#include "crf/torus_flow.h"

using namespace crf;

namespace {

std::vector<double> cosine_field(int G, double amp, int axis) {
    std::vector<double> f(static_cast<size_t>(G) * G * G * G);
    size_t idx = 0;
    for (int g0 = 0; g0 < G; ++g0)
        for (int g1 = 0; g1 < G; ++g1)
            for (int g2 = 0; g2 < G; ++g2)
                for (int g3 = 0; g3 < G; ++g3) {
                    const int g[4] = {g0, g1, g2, g3};
                    f[idx++] = amp * std::cos(2.0 * M_PI * g[axis] / G);
                }
    return f;
}

}  // namespace

TEST_CASE("volume laws of the closed-form solutions") {
    SamplerParams par;
    par.shells = 8;
    par.directions = 120;
    par.layers = 5;
    par.grid = 8;
    par.base_points = 80;
    par.w_phases = 6;

    const SurfaceModel hopf = hopf_default(2);
    const SampleSet hs = sample_fundamental_domain(hopf, par);
    const double hv0 = total_volume(hopf, hs, 0.0);
    CHECK(total_volume(hopf, hs, 0.2) / hv0 == doctest::Approx(0.6).epsilon(2e-3));

    const SurfaceModel sm = inoue_sm_default();
    const SampleSet ss = sample_fundamental_domain(sm, par);
    const double sv0 = total_volume(sm, ss, 0.0);
    CHECK(total_volume(sm, ss, 8.0) / sv0 == doctest::Approx(3.0).epsilon(2e-3));

    const SurfaceModel ell = elliptic_default();
    const SampleSet es = sample_fundamental_domain(ell, par);
    const double ev0 = total_volume(ell, es, 0.0);
    CHECK(total_volume(ell, es, 8.0) / ev0 == doctest::Approx(5.0).epsilon(2e-3));
}

TEST_CASE("normalized limit distance decays like C/t") {
    SamplerParams par;
    par.base_points = 60;
    par.shells = 6;
    par.w_phases = 4;
    const SurfaceModel ell = elliptic_default();
    const SampleSet set = sample_fundamental_domain(ell, par);
    const double d1 = normalized_limit_distance(ell, set, 100.0);
    const double d2 = normalized_limit_distance(ell, set, 400.0);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("periodic grid derivative is high order") {
    // d/dx cos(2 pi x) at the grid nodes; the 4th-order stencil error drops
    // by ~16x when the grid doubles.
    double errs[2];
    int gi = 0;
    for (int G : {8, 16}) {
        const std::vector<double> f = cosine_field(G, 1.0, 0);
        const std::vector<double> d = grid_deriv1(G, f, 0);
        double worst = 0.0;
        size_t idx = 0;
        for (int g0 = 0; g0 < G; ++g0)
            for (int r = 0; r < G * G * G; ++r) {
                const double exact = -2.0 * M_PI * std::sin(2.0 * M_PI * g0 / G);
                worst = std::max(worst, std::abs(d[idx++] - exact));
            }
        errs[gi++] = worst;
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 3.5);
}

TEST_CASE("grid complex hessian of a plane wave") {
    // psi = cos(2 pi x0) with z1 = x0 + i x1: d_1 d_1-bar psi = -pi^2 cos(2 pi x0).
    const int G = 16;
    const std::vector<double> f = cosine_field(G, 1.0, 0);
    const GridHermitian h = grid_complex_hessian(G, f);
    double worst = 0.0, worst_off = 0.0;
    size_t idx = 0;
    for (int g0 = 0; g0 < G; ++g0)
        for (int r = 0; r < G * G * G; ++r) {
            const double exact = -M_PI * M_PI * std::cos(2.0 * M_PI * g0 / G);
            worst = std::max(worst, std::abs(h.h11[idx] - exact));
            worst_off = std::max(worst_off, std::abs(h.h12[idx]));
            worst_off = std::max(worst_off, std::abs(h.h22[idx]));
            ++idx;
        }
    CHECK(worst <= 2e-2);
    CHECK(worst_off <= 1e-12);
}

TEST_CASE("torus background normalization") {
    const int G = 8;
    const TorusBackground bg = make_torus_background(G, cosine_field(G, 0.05, 0));
    double lhs = 0.0, rhs = 0.0;
    for (size_t i = 0; i < bg.det0.size(); ++i) {
        lhs += std::exp(bg.F[i]) * bg.det0[i];
        rhs += bg.det0[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("positivity guard of the potential metric") {
    const int G = 8;
    const TorusBackground bg = make_torus_background(G, cosine_field(G, 0.05, 0));
    CHECK_NOTHROW(metric_of_potential(bg, cosine_field(G, 0.01, 1)));
    CHECK_THROWS_AS(metric_of_potential(bg, cosine_field(G, 10.0, 1)), PositivityLost);
}

TEST_CASE("short Monge-Ampere run: monotone energy, conserved volume") {
    const int G = 8;
    const TorusBackground bg = make_torus_background(G, cosine_field(G, 0.05, 0));
    const TorusFlowResult res = evolve_torus_ma(bg, std::vector<double>(bg.psi.size(), 0.0),
                                                2.0, 5e-3, {0.1, 0.5, 1.0});
    REQUIRE(res.steps.size() > 2);
    for (size_t i = 1; i < res.steps.size(); ++i) {
        CHECK(res.steps[i].mabuchi <= res.steps[i - 1].mabuchi + 1e-9);
        CHECK(std::abs(res.steps[i].volume - res.steps[0].volume) <=
              1e-10 * std::abs(res.steps[0].volume));
    }
    CHECK(res.final_sup_phidot < res.steps.front().sup_phidot);

    // Derivative identity and sign of the gradient integral at the probes.
    REQUIRE(res.probes.size() == 3);
    for (const EnergyReport& pr : res.probes) {
        // Late probes have derivatives near 1e-8 where the centered difference
        // is dominated by rounding, hence the small absolute term.
        CHECK(std::abs(pr.derivative_formula - pr.derivative_fd) <=
              1e-4 * std::abs(pr.derivative_fd) + 1e-10);
        CHECK(pr.derivative_formula <= 0.0);
    }
}

TEST_CASE("mabuchi gradient integral is nonpositive") {
    const int G = 8;
    const TorusBackground bg = make_torus_background(G, cosine_field(G, 0.05, 0));
    CHECK(mabuchi_gradient_integral(bg, cosine_field(G, 0.02, 1)) <= 0.0);
    // On a flat background with constant potential phi-dot vanishes identically.
    const TorusBackground flat =
        make_torus_background(G, std::vector<double>(bg.psi.size(), 0.0));
    CHECK(std::abs(mabuchi_gradient_integral(
              flat, std::vector<double>(bg.psi.size(), 0.3))) <= 1e-12);
}
