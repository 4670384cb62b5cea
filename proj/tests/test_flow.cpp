#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "crf/errors.h"
#include "crf/fd.h"
#include "crf/flow.h"
#include "crf/models.h"

using namespace crf;

TEST_CASE("evolve_ansatz reproduces the closed-form states") {
    const SurfaceModel m = hopf_default(2);
    const FlowTrajectory traj = evolve_ansatz(m, 0.49, 10);
    REQUIRE(traj.times.size() == traj.states.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const AnsatzState exact = ansatz_at_time(m, traj.times[i]);
        for (size_t c = 0; c < exact.coeffs.size(); ++c) {
            CHECK(std::abs(traj.states[i].coeffs[c] - exact.coeffs[c]) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(evolve_ansatz(m, 0.5, 10), TimeOutOfRange);
}

TEST_CASE("semigroup property of the ansatz flow") {
    for (const SurfaceModel& m : {hopf_default(2), inoue_sm_default(),
                                  inoue_splus_default(), elliptic_default()}) {
        CAPTURE(family_name(m.family));
        const double T = max_existence_time(m);
        const double t1 = std::isinf(T) ? 3.0 : 0.2;
        const double t2 = std::isinf(T) ? 4.0 : 0.25;
        const AnsatzState mid = ansatz_at_time(m, t1);
        const FlowTrajectory tail = evolve_ansatz_from(m, mid, t2, 5);
        const AnsatzState direct = ansatz_at_time(m, t1 + t2);
        const AnsatzState& end = tail.states.back();
        for (size_t c = 0; c < direct.coeffs.size(); ++c) {
            CHECK(std::abs(end.coeffs[c] - direct.coeffs[c]) <= 1e-10);
        }
    }
}

TEST_CASE("finite-difference Chern-Ricci matches the closed forms") {
    std::mt19937_64 rng(3);
    for (const SurfaceModel& m : {hopf_default(2), hopf_default(3), inoue_sm_default(),
                                  inoue_splus_default(), inoue_sminus_default(),
                                  elliptic_default(), torus_default()}) {
        CAPTURE(family_name(m.family));
        const MetricField field = initial_metric(m);
        for (int s = 0; s < 10; ++s) {
            const ComplexPoint p = random_chart_point(m, rng);
            const HermitianForm fd = chern_ricci_fd(field, p, 0.0);
            const HermitianForm exact = closed_form_ricci(m, p);
            CHECK(sup_distance(fd, exact) <= 1e-6);
        }
    }
}

TEST_CASE("flow identity d/dt omega = -Ric on random samples") {
    for (const SurfaceModel& m : {hopf_default(2), inoue_sm_default(),
                                  elliptic_default()}) {
        CAPTURE(family_name(m.family));
        const ValidationReport rep = validate_flow(m, 10, 1e-3, 1e-4);
        CHECK(rep.samples == 10);
        CHECK(rep.max_flow_deviation <= 1e-4);
        CHECK(rep.max_invariance_defect <= 1e-10);
    }
}

TEST_CASE("evolved surface metrics stay Gauduchon") {
    for (const SurfaceModel& m : {hopf_default(2), inoue_sm_default(),
                                  inoue_splus_default(), elliptic_default()}) {
        CAPTURE(family_name(m.family));
        const ValidationReport rep = validate_flow(m, 10, 1e-3, 1e-4);
        CHECK(rep.max_gauduchon_defect <= 1e-5);
    }
}

TEST_CASE("gauduchon defect detects a non-Gauduchon surface metric") {
    // g_11 = 1 + |z2|^2 on the torus cell is not ddbar-closed.
    SurfaceModel m = torus_default();
    MetricField field = initial_metric(m);
    field.eval = [](const ComplexPoint& p, double) {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(2, 2);
        g(0, 0) = 1.0 + std::norm(p.coords[1]);
        return HermitianForm(g);
    };
    const ComplexPoint p{{cd(0.4, 0.5), cd(0.5, 0.4)}, Chart::TorusCell};
    CHECK(gauduchon_defect_fd(field, p, 0.0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Chern-Ricci is natural under holomorphic conjugation") {
    // Pull back the Hopf solution by (z1, z2) -> (a z1, b z2): the FD Ricci of
    // the pulled-back field equals the pulled-back closed-form Ricci.
    const SurfaceModel m = hopf_default(2);
    const cd a(1.3, 0.4), b(0.8, -0.2);
    const MetricField pulled = pullback_field(
        closed_form_metric(m),
        [a, b](const std::vector<cd>& z) { return std::vector<cd>{a * z[0], b * z[1]}; },
        [a, b](const std::vector<cd>&) {
            Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2, 2);
            j(0, 0) = a;
            j(1, 1) = b;
            return j;
        });
    std::mt19937_64 rng(5);
    for (int s = 0; s < 5; ++s) {
        const ComplexPoint p = random_chart_point(m, rng);
        const HermitianForm lhs = chern_ricci_fd(pulled, p, 0.2);
        Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2, 2);
        j(0, 0) = a;
        j(1, 1) = b;
        const std::vector<cd> fp{a * p.coords[0], b * p.coords[1]};
        const HermitianForm ric = closed_form_ricci(m, {fp, p.chart});
        const HermitianForm rhs((j.transpose() * ric.g * j.conjugate()).eval());
        CHECK(sup_distance(lhs, rhs) <= 1e-6);
    }
}

TEST_CASE("time domain guards of the closed-form solution") {
    const MetricField field = closed_form_metric(hopf_default(2));
    const ComplexPoint p{{cd(1.0, 0.0), cd(0.0, 1.0)}, Chart::PuncturedCn};
    CHECK_NOTHROW(field.eval(p, 0.49));
    CHECK_THROWS_AS(field.eval(p, 0.5), TimeOutOfRange);
    CHECK_THROWS_AS(field.eval(p, -0.01), TimeOutOfRange);
}
