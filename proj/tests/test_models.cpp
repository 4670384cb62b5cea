#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "crf/errors.h"
#include "crf/flow.h"
#include "crf/models.h"

using namespace crf;

namespace {

std::vector<SurfaceModel> default_models() {
    return {hopf_default(2),       hopf_default(3),      inoue_sm_default(),
            inoue_splus_default(), inoue_splus_default(1.0),
            inoue_sminus_default(), elliptic_default(),  torus_default()};
}

}  // namespace

TEST_CASE("default instances satisfy their construction relations") {
    for (const SurfaceModel& m : default_models()) {
        CAPTURE(family_name(m.family));
        CHECK(m.invariant_defect() <= 1e-9);
    }
}

TEST_CASE("derived eigendata of the concrete instances") {
    const SurfaceModel sm = inoue_sm_default();
    CHECK(sm.alpha == doctest::Approx(1.46557123187677).epsilon(1e-10));
    CHECK(sm.alpha * std::norm(sm.sm_beta) == doctest::Approx(1.0).epsilon(1e-10));

    const SurfaceModel sp = inoue_splus_default();
    CHECK(sp.alpha == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-10));
    CHECK(sp.in_m == doctest::Approx(0.0));
    CHECK(inoue_splus_default(1.0).in_m == doctest::Approx(1.0).epsilon(1e-10));

    CHECK(hopf_default(2).alpha == doctest::Approx(2.0));
    CHECK(elliptic_default().alpha == doctest::Approx(2.0));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(hopf_model(2, {cd(1.0, 0.0), cd(1.0, 0.0)}), InvalidModelParameters);
    CHECK_THROWS_AS(hopf_model(2, {cd(2.0, 0.0), cd(3.0, 0.0)}), InvalidModelParameters);
    Eigen::Matrix2d bad;
    bad << 2.0, 0.0, 0.0, 2.0;  // det = 4
    CHECK_THROWS_AS(elliptic_model({bad}, cd(2.0, 0.0), {cd(1.0, 0.0)}),
                    InvalidModelParameters);
    CHECK_THROWS_AS(elliptic_model(elliptic_default().ell_gens, cd(1.0, 0.0),
                                   std::vector<cd>(4, cd(1.0, 0.0))),
                    InvalidModelParameters);
    CHECK_THROWS_AS(torus_model(Eigen::Matrix4d::Zero()), InvalidModelParameters);
}

TEST_CASE("existence times") {
    CHECK(max_existence_time(hopf_default(2)) == doctest::Approx(0.5));
    CHECK(max_existence_time(hopf_default(3)) == doctest::Approx(1.0 / 3.0));
    CHECK(std::isinf(max_existence_time(inoue_sm_default())));
    CHECK(std::isinf(max_existence_time(elliptic_default())));
    CHECK(std::isinf(max_existence_time(torus_default())));
}

TEST_CASE("closed-form ansatz coefficients are affine in t") {
    const double t = 0.3;
    CHECK(ansatz_at_time(hopf_default(2), t).coeffs[0] == doctest::Approx(1.0 - 2.0 * t));
    CHECK(ansatz_at_time(hopf_default(2), t).coeffs[1] == doctest::Approx(2.0 * t));
    CHECK(ansatz_at_time(inoue_sm_default(), 8.0).coeffs[0] == doctest::Approx(3.0));
    CHECK(ansatz_at_time(inoue_sm_default(), 8.0).coeffs[1] == doctest::Approx(1.0));
    CHECK(ansatz_at_time(inoue_splus_default(), 8.0).coeffs[0] == doctest::Approx(5.0));
    CHECK(ansatz_at_time(elliptic_default(), 8.0).coeffs[0] == doctest::Approx(6.0));
    CHECK_THROWS_AS(ansatz_at_time(hopf_default(2), 0.5), TimeOutOfRange);
    CHECK_THROWS_AS(ansatz_at_time(hopf_default(2), -0.1), TimeOutOfRange);
}

TEST_CASE("ansatz velocity is the constant -Ricci of each family") {
    CHECK(ansatz_ricci(hopf_default(2), initial_ansatz(hopf_default(2)))[0] ==
          doctest::Approx(-2.0));
    CHECK(ansatz_ricci(hopf_default(2), initial_ansatz(hopf_default(2)))[1] ==
          doctest::Approx(2.0));
    CHECK(ansatz_ricci(inoue_sm_default(), initial_ansatz(inoue_sm_default()))[0] ==
          doctest::Approx(0.25));
    CHECK(ansatz_ricci(inoue_sm_default(), initial_ansatz(inoue_sm_default()))[1] ==
          doctest::Approx(0.0));
    CHECK(ansatz_ricci(elliptic_default(), initial_ansatz(elliptic_default()))[0] ==
          doctest::Approx(0.5));
}

TEST_CASE("metrics are invariant under the identifications") {
    std::mt19937_64 rng(11);
    for (const SurfaceModel& m : default_models()) {
        CAPTURE(family_name(m.family));
        const MetricField field = closed_form_metric(m);
        const double t = m.family == Family::Hopf ? 0.3 : 5.0;
        for (int s = 0; s < 5; ++s) {
            const ComplexPoint p = random_chart_point(m, rng);
            const HermitianForm gp = field.eval(p, t);
            for (const GeneratorMap& gen : m.identifications()) {
                const std::vector<cd> q = gen.apply(p.coords);
                const Eigen::MatrixXcd j = gen.jacobian(p.coords);
                const HermitianForm gq = field.eval({q, p.chart}, t);
                // With the first index holomorphic the pullback is J^T g Jbar.
                const HermitianForm pulled(
                    (j.transpose() * gq.g * j.conjugate()).eval());
                CAPTURE(gen.name);
                CHECK(sup_distance(gp, pulled) <= 1e-10);
            }
        }
    }
}

TEST_CASE("positivity of ansatz states") {
    const SurfaceModel hopf = hopf_default(2);
    CHECK(ansatz_positive(hopf, ansatz_at_time(hopf, 0.499)));
    CHECK_FALSE(ansatz_positive(hopf, AnsatzState{{-0.1, 1.1}, 0.55}));
    const SurfaceModel ell = elliptic_default();
    CHECK(ansatz_positive(ell, ansatz_at_time(ell, 100.0)));
    CHECK_FALSE(ansatz_positive(ell, AnsatzState{{0.5}, 0.0}));
}

TEST_CASE("degenerate limits") {
    CHECK(limit_form(hopf_default(2)).tag == LimitForm::Tag::FixedTime);
    CHECK(limit_form(inoue_sm_default()).tag == LimitForm::Tag::NormalizedOverT);

    // Elliptic normalized limit at y = 1 is diag(1/2, 0).
    const LimitForm lf = limit_form(elliptic_default());
    CHECK(lf.tag == LimitForm::Tag::NormalizedOverT);
    const HermitianForm l =
        lf.eval({{cd(0.0, 1.0), cd(1.0, 0.0)}, Chart::HalfPlaneCStar});
    CHECK(std::abs(l.g(0, 0) - 0.5) <= 1e-12);
    CHECK(std::abs(l.g(1, 1)) <= 1e-12);

    // And omega(t)/t approaches it like C/t.
    const SurfaceModel ell = elliptic_default();
    const MetricField field = closed_form_metric(ell);
    const ComplexPoint p{{cd(0.0, 1.0), cd(1.0, 0.0)}, Chart::HalfPlaneCStar};
    const double d200 = sup_distance(HermitianForm((field.eval(p, 200.0).g / 200.0).eval()), l);
    const double d400 = sup_distance(HermitianForm((field.eval(p, 400.0).g / 400.0).eval()), l);
    CHECK(d200 / d400 == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sminus double cover is the squared-matrix splus surface") {
    const SurfaceModel sminus = inoue_sminus_default();
    const SurfaceModel cover = sminus_double_cover(sminus);
    CHECK(cover.family == Family::InoueSPlus);
    CHECK(cover.alpha == doctest::Approx(sminus.alpha * sminus.alpha).epsilon(1e-10));
    CHECK(cover.invariant_defect() <= 1e-9);
}

TEST_CASE("json round trip") {
    for (const SurfaceModel& m : default_models()) {
        CAPTURE(family_name(m.family));
        nlohmann::json j1 = m;
        const SurfaceModel back = j1.get<SurfaceModel>();
        nlohmann::json j2 = back;
        CHECK(j1 == j2);
        CHECK(back.family == m.family);
        CHECK(back.alpha == doctest::Approx(m.alpha).epsilon(1e-14));
    }
}
