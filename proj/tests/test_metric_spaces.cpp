#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "crf/errors.h"
#include "crf/metric_space.h"
#include "crf/sampler.h"

using namespace crf;

namespace {

/// Circle sample space of n points with exact circle distances.
SampledMetricSpace circle_space(int n, double radius, SampleSet& set) {
    set = SampleSet{};
    SampledMetricSpace space;
    space.dist.resize(n, n);
    for (int i = 0; i < n; ++i) {
        space.ids.push_back(i);
        set.points.push_back({{cd(0.0, 1.0), cd(0.0, 0.0)}, Chart::HalfPlaneC});
        set.circle_coord.push_back(static_cast<double>(i) / n);
        set.cell.push_back(0);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double d = std::abs(i - j) / static_cast<double>(n);
            d = std::min(d, 1.0 - d);
            space.dist(i, j) = 2.0 * M_PI * radius * d;
        }
    }
    return space;
}

}  // namespace

TEST_CASE("flat torus graph distances match the wrapped euclidean oracle") {
    const SurfaceModel m = torus_default();
    SamplerParams par;
    par.grid = 6;
    const SampleSet set = sample_fundamental_domain(m, par);
    std::vector<int> subset;
    for (int i = 0; i < set.size(); ++i) {
        if (set.cell[i] % 29 == 0) subset.push_back(i);
    }
    const SampledMetricSpace space = build_space(m, 0.0, set, 8, subset, 4, 1.0, true);
    for (int i = 0; i < space.size(); ++i) {
        for (int j = i + 1; j < space.size(); ++j) {
            const std::vector<cd>& a = set.points[subset[i]].coords;
            const std::vector<cd>& b = set.points[subset[j]].coords;
            // |X|^2 = 2 |xi|^2 for the identity form: distances are sqrt(2)
            // times the wrapped euclidean distance.
            double sq = 0.0;
            for (int c = 0; c < 2; ++c) {
                double dx = std::abs(a[c].real() - b[c].real());
                double dy = std::abs(a[c].imag() - b[c].imag());
                dx = std::min(dx, 1.0 - dx);
                dy = std::min(dy, 1.0 - dy);
                sq += dx * dx + dy * dy;
            }
            const double exact = std::sqrt(2.0 * sq);
            CHECK(space.dist(i, j) >= exact - 1e-9);
            CHECK(space.dist(i, j) <= 1.02 * exact + 1e-9);
        }
    }
}

TEST_CASE("circle references") {
    const ReferenceSpace ref = circle_reference(2.0, 8);
    CHECK(ref.circumference() == doctest::Approx(4.0 * M_PI));
    CHECK(ref.distance(0, 4) == doctest::Approx(2.0 * M_PI));
    CHECK(ref.distance(1, 2) == doctest::Approx(ref.circumference() / 8.0));

    CHECK(hopf_circle_reference(hopf_default(2), 4).radius ==
          doctest::Approx(std::log(2.0) / (std::sqrt(2.0) * M_PI)));
    CHECK(inoue_circle_reference(inoue_sm_default(), 4).radius ==
          doctest::Approx(std::log(inoue_sm_default().alpha) /
                          (2.0 * std::sqrt(2.0) * M_PI)));
    CHECK(inoue_circle_reference(inoue_splus_default(), 4).radius ==
          doctest::Approx(std::log(inoue_splus_default().alpha) / (2.0 * M_PI)));
    CHECK(inoue_circle_reference(inoue_sminus_default(), 4).radius ==
          doctest::Approx(std::log(inoue_sminus_default().alpha) / M_PI));
    CHECK_THROWS_AS(hopf_circle_reference(torus_default(), 4), FamilyMismatch);
}

TEST_CASE("gh bound of a circle against itself is the sampling gap") {
    const double r = 0.7;
    const int n = 64, M = 64;
    SampleSet set;
    const SampledMetricSpace space = circle_space(n, r, set);
    const ReferenceSpace ref = circle_reference(r, M);
    const Correspondence corr = circle_correspondence(space, set, ref);
    CHECK(gh_upper_bound(space, ref, corr) <= 2.0 * M_PI * r / n + 1e-12);
}

TEST_CASE("gh bound of a point against a circle is the radius times pi") {
    const double r = 0.7;
    SampleSet set;
    const SampledMetricSpace space = circle_space(1, r, set);
    const ReferenceSpace ref = circle_reference(r, 64);
    const Correspondence corr = circle_correspondence(space, set, ref);
    CHECK(gh_upper_bound(space, ref, corr) == doctest::Approx(M_PI * r).epsilon(1e-2));
}

TEST_CASE("equivariant quotient of a circle by the antipodal map") {
    const double r = 1.0;
    const int n = 16;
    SampleSet set;
    const SampledMetricSpace space = circle_space(n, r, set);
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = (i + n / 2) % n;
    const SampledMetricSpace q = equivariant_quotient(space, sigma);
    CHECK(q.diameter() == doctest::Approx(M_PI * r / 2.0).epsilon(1e-9));

    // Breaking the isometry is detected.
    SampledMetricSpace bad = space;
    bad.dist(0, 1) += 0.1;
    bad.dist(1, 0) += 0.1;
    CHECK_THROWS_AS(equivariant_quotient(bad, sigma), NotAnIsometry);
}

TEST_CASE("equivariant gh bound dominates the plain bound") {
    const double r = 0.7;
    const int n = 32;
    SampleSet set;
    const SampledMetricSpace space = circle_space(n, r, set);
    const ReferenceSpace ref = circle_reference(r, n);
    const Correspondence corr = circle_correspondence(space, set, ref);
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = (i + n / 2) % n;
    const double plain = gh_upper_bound(space, ref, corr);
    const double equi = equivariant_gh_upper_bound(space, ref, corr, sigma, sigma);
    CHECK(equi >= plain - 1e-12);
    CHECK(equi <= plain + 2.0 * M_PI * r / n + 1e-12);
}

TEST_CASE("hyperbolic distances") {
    CHECK(hyperbolic_distance(cd(0.0, 1.0), cd(0.0, 2.0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(hyperbolic_distance(cd(-0.3, 0.8), cd(0.5, 1.7)) ==
          doctest::Approx(std::acosh(1.0 + (0.64 + 0.81) / (2.0 * 0.8 * 1.7))));

    // The word-minimized reference never exceeds the plain distance and agrees
    // with it for nearby points well inside the fundamental polygon.
    const std::vector<cd> pts{cd(0.0, 1.0), cd(0.2, 1.1), cd(-1.2, 0.6)};
    const ReferenceSpace ref = hyperbolic_reference(elliptic_default(), pts, 2);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            CHECK(ref.distance(i, j) <= hyperbolic_distance(pts[i], pts[j]) + 1e-12);
        }
    }
    CHECK(ref.distance(0, 1) == doctest::Approx(hyperbolic_distance(pts[0], pts[1])));
}

TEST_CASE("hopf diameter is stable under sampling refinement") {
    const SurfaceModel m = hopf_default(2);
    double diam[2];
    int di = 0;
    for (int scale : {0, 1}) {
        SamplerParams par;
        par.shells = scale ? 12 : 8;
        par.directions = scale ? 350 : 180;
        const SampleSet set = sample_fundamental_domain(m, par);
        std::vector<int> subset;
        for (int i = 0; i < set.size(); ++i) {
            if (set.cell[i] % 7 == 0) subset.push_back(i);
        }
        diam[di++] = build_space(m, 0.25, set, 12, subset, 4).diameter();
    }
    CHECK(std::abs(diam[1] / diam[0] - 1.0) <= 0.10);
}

TEST_CASE("fiber collapse rate tracks the closed-form shrinking factor") {
    const SurfaceModel m = hopf_default(2);
    SamplerParams par;
    par.shells = 8;
    par.directions = 250;
    const SampleSet set = sample_fundamental_domain(m, par);
    const double r0 = fiber_collapse_rate(m, 0.1, set);
    const double r1 = fiber_collapse_rate(m, 0.4, set);
    CHECK(r0 > 0.0);
    CHECK(r1 / r0 ==
          doctest::Approx(std::sqrt(0.2 / 0.8)).epsilon(0.2));
}

TEST_CASE("distance matrix export format") {
    Eigen::MatrixXd d(2, 2);
    d << 0.0, 1.5, 1.5, 0.0;
    const std::string path = "dist_matrix_test.bin";
    write_distance_matrix(path, d);
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 8);
    CHECK(count == 2);
    double vals[4];
    in.read(reinterpret_cast<char*>(vals), 32);
    CHECK(vals[1] == doctest::Approx(1.5));
    CHECK(in.gcount() == 32);
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("build_space is deterministic for a fixed seed") {
    const SurfaceModel m = inoue_sm_default();
    SamplerParams par;
    par.layers = 4;
    par.grid = 6;
    Eigen::MatrixXd first;
    for (int rep = 0; rep < 2; ++rep) {
        const SampleSet set = sample_fundamental_domain(m, par);
        std::vector<int> subset;
        for (int i = 0; i < set.size(); ++i) {
            if (set.cell[i] % 11 == 0) subset.push_back(i);
        }
        const SampledMetricSpace space =
            build_space(m, 50.0, set, 8, subset, 4, 1.0 / std::sqrt(50.0), true);
        if (rep == 0) {
            first = space.dist;
        } else {
            CHECK((space.dist - first).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}
