#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "crf/errors.h"
#include "crf/fd.h"
#include "crf/hermitian.h"

using namespace crf;

namespace {

HermitianForm form2(cd a11, cd a12, cd a21, cd a22) {
    Eigen::MatrixXcd g(2, 2);
    g << a11, a12, a21, a22;
    return HermitianForm(g);
}

}  // namespace

TEST_CASE("hermitian defect and symmetrize") {
    HermitianForm f = form2(2.0, cd(0.5, 0.3), cd(0.5, -0.3 + 1e-3), 1.0);
    CHECK(f.hermitian_defect() == doctest::Approx(1e-3).epsilon(1e-6));
    f.symmetrize();
    CHECK(f.hermitian_defect() <= 1e-15);
    CHECK(f.g(0, 1) == std::conj(f.g(1, 0)));
}

TEST_CASE("determinant of a hermitian form is real") {
    const HermitianForm f = form2(2.0, cd(0.5, 0.3), cd(0.5, -0.3), 1.0);
    CHECK(det_g(f) == doctest::Approx(2.0 - 0.25 - 0.09).epsilon(1e-12));
}

TEST_CASE("positivity via leading minors") {
    CHECK(is_positive(form2(2.0, cd(0.0, 1.0), cd(0.0, -1.0), 1.0)));
    CHECK_FALSE(is_positive(form2(2.0, cd(0.0, 2.0), cd(0.0, -2.0), 1.0)));
    CHECK_FALSE(is_positive(form2(-1.0, 0.0, 0.0, 1.0)));
}

TEST_CASE("trace_with identity and singular guard") {
    const HermitianForm g = form2(3.0, cd(1.0, 0.5), cd(1.0, -0.5), 2.0);
    CHECK(trace_with(g, g) == doctest::Approx(2.0).epsilon(1e-12));
    const HermitianForm near_sing = form2(1.0, 0.0, 0.0, 1e-14);
    CHECK_THROWS_AS(trace_with(near_sing, g), SingularMetric);
}

TEST_CASE("sup distance") {
    const HermitianForm a = form2(1.0, 0.0, 0.0, 1.0);
    const HermitianForm b = form2(1.0, cd(0.0, 0.25), cd(0.0, -0.25), 1.5);
    CHECK(sup_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("chart membership") {
    CHECK(chart_contains(Chart::PuncturedCn, {cd(1.0, 0.0), cd(0.0, 0.0)}));
    CHECK_FALSE(chart_contains(Chart::PuncturedCn, {cd(0.0, 0.0), cd(0.0, 0.0)}));
    CHECK(chart_contains(Chart::HalfPlaneC, {cd(0.0, 1.0), cd(5.0, -3.0)}));
    CHECK_FALSE(chart_contains(Chart::HalfPlaneC, {cd(0.0, -1.0), cd(0.0, 0.0)}));
    CHECK(chart_contains(Chart::HalfPlaneCStar, {cd(0.0, 1.0), cd(1.0, 0.0)}));
    CHECK_FALSE(chart_contains(Chart::HalfPlaneCStar, {cd(0.0, 1.0), cd(0.0, 0.0)}));
}

TEST_CASE("complex hessian of quadratic functions is exact") {
    const std::vector<cd> p{cd(0.3, 0.4), cd(-0.2, 0.9)};
    const auto f1 = [](const std::vector<cd>& z) { return z[0] * std::conj(z[0]); };
    Eigen::MatrixXcd h = complex_hessian(f1, p, Chart::HalfPlaneC);
    CHECK(std::abs(h(0, 0) - 1.0) <= 1e-9);
    CHECK(std::abs(h(0, 1)) <= 1e-9);
    CHECK(std::abs(h(1, 1)) <= 1e-9);

    const auto f2 = [](const std::vector<cd>& z) { return z[0] * std::conj(z[1]); };
    h = complex_hessian(f2, p, Chart::HalfPlaneC);
    CHECK(std::abs(h(0, 1) - 1.0) <= 1e-9);
    CHECK(std::abs(h(1, 0)) <= 1e-9);
}

TEST_CASE("complex hessian converges at second order") {
    // f = exp(|z1|^2) has d_1 d_1-bar f = (1 + |z1|^2) exp(|z1|^2).
    const std::vector<cd> p{cd(0.4, 0.7), cd(0.1, 0.2)};
    const auto f = [](const std::vector<cd>& z) {
        return std::exp(z[0] * std::conj(z[0]));
    };
    const double exact = (1.0 + std::norm(p[0])) * std::exp(std::norm(p[0]));
    std::vector<double> errs;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const Eigen::MatrixXcd hess = complex_hessian(f, p, Chart::HalfPlaneC, h);
        errs.push_back(std::abs(hess(0, 0) - exact));
    }
    for (size_t i = 1; i < errs.size(); ++i) {
        const double order = std::log2(errs[i - 1] / errs[i]);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("stencil leaving the chart throws") {
    const auto f = [](const std::vector<cd>& z) { return z[0] * std::conj(z[0]); };
    const std::vector<cd> p{cd(0.0, 5e-4), cd(0.0, 0.0)};
    CHECK_THROWS_AS(complex_hessian(f, p, Chart::HalfPlaneC, 1e-3), StencilOutOfDomain);
}
