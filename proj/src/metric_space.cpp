#include "crf/metric_space.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <queue>
#include <thread>

#include "crf/errors.h"

namespace crf {

namespace {

const cd kI(0.0, 1.0);
const double kGaussNodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
const double kGaussWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

/// Riemannian length of the straight chart segment from a to b at time t.
double segment_length(const MetricField& field, const std::vector<cd>& a,
                      const std::vector<cd>& b, Chart chart, double t) {
    const size_t n = a.size();
    std::vector<cd> v(n), p(n);
    for (size_t i = 0; i < n; ++i) v[i] = b[i] - a[i];
    double len = 0.0;
    for (int q = 0; q < 3; ++q) {
        for (size_t i = 0; i < n; ++i) p[i] = a[i] + kGaussNodes[q] * v[i];
        const HermitianForm g = field.eval({p, chart}, t);
        cd quad = 0.0;
        // |X|^2 = 2 sum g_{ij-bar} xi_i xi_j-bar: first index holomorphic.
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                quad += v[i] * g.g(i, j) * std::conj(v[j]);
            }
        }
        len += kGaussWeights[q] * std::sqrt(std::max(0.0, 2.0 * quad.real()));
    }
    return len;
}

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;

/// Affine chart self-map z -> z + A, w -> w + B z + C (the form of every
/// fiber identification of the Inoue families).
struct AffineZW {
    cd A{0.0}, B{0.0}, C{0.0};
};

AffineZW affine_compose(const AffineZW& t1, const AffineZW& t2) {
    // Apply t1 first, then t2.
    return {t1.A + t2.A, t1.B + t2.B, t1.C + t2.C + t2.B * t1.A};
}

AffineZW affine_inverse(const AffineZW& t) { return {-t.A, -t.B, -t.C + t.B * t.A}; }

std::vector<cd> affine_apply(const AffineZW& t, const std::vector<cd>& p) {
    return {p[0] + t.A, p[1] + t.B * p[0] + t.C};
}

/// The y-preserving (fiber) identifications of an Inoue model as affine maps.
std::vector<AffineZW> fiber_affines(const SurfaceModel& model) {
    std::vector<AffineZW> out;
    const std::vector<cd> p0{cd(0.0, 1.0), cd(0.0, 0.0)};
    const std::vector<cd> p1{cd(1.0, 1.0), cd(0.0, 0.0)};
    for (const GeneratorMap& gen : model.identifications()) {
        const std::vector<cd> q0 = gen.apply(p0);
        if (std::abs(q0[0].imag() - 1.0) > 1e-12) continue;  // skip the y-scaling
        const std::vector<cd> q1 = gen.apply(p1);
        AffineZW t;
        t.A = q0[0] - p0[0];
        t.B = (q1[1] - q0[1]) / (p1[0] - p0[0]);
        t.C = q0[1] - t.B * p0[0];
        out.push_back(t);
    }
    return out;
}

/// All words g1^k1 g2^k2 g3^k3 with |k1|,|k2| <= 3, |k3| <= 2.
std::vector<AffineZW> fiber_words(const std::vector<AffineZW>& gens) {
    std::vector<std::vector<AffineZW>> pows(gens.size());
    const int kmax[3] = {3, 3, 2};
    for (size_t g = 0; g < gens.size(); ++g) {
        const int km = kmax[std::min<size_t>(g, 2)];
        pows[g].resize(2 * km + 1);
        pows[g][km] = AffineZW{};
        for (int k = 1; k <= km; ++k) {
            pows[g][km + k] = affine_compose(pows[g][km + k - 1], gens[g]);
            pows[g][km - k] = affine_compose(pows[g][km - k + 1], affine_inverse(gens[g]));
        }
    }
    std::vector<AffineZW> words{AffineZW{}};
    for (size_t g = 0; g < gens.size(); ++g) {
        std::vector<AffineZW> next;
        for (const AffineZW& w : words) {
            for (const AffineZW& p : pows[g]) next.push_back(affine_compose(w, p));
        }
        words = std::move(next);
    }
    return words;
}

/// A Fuchsian group word with its character value.  Words are deduplicated in
/// PSL(2,R): the character is well defined per group element and w -> -w is an
/// isometry of the elliptic model metrics.
struct FuchsianWord {
    Eigen::Matrix2d A;
    cd chi;
};

std::vector<FuchsianWord> fuchsian_words(const SurfaceModel& model, int word_len) {
    std::vector<FuchsianWord> letters;
    for (size_t k = 0; k < model.ell_gens.size(); ++k) {
        const cd chi = model.ell_chi.empty() ? cd(1.0) : model.ell_chi[k];
        letters.push_back({model.ell_gens[k], chi});
        letters.push_back({model.ell_gens[k].inverse(), 1.0 / chi});
    }
    std::vector<FuchsianWord> words{{Eigen::Matrix2d::Identity(), cd(1.0)}};
    std::vector<FuchsianWord> frontier = words;
    for (int l = 0; l < word_len; ++l) {
        std::vector<FuchsianWord> next;
        for (const auto& w : frontier) {
            for (const auto& g : letters) {
                const Eigen::Matrix2d c = w.A * g.A;
                bool dup = false;
                for (const auto& e : words) {
                    // Exact-matrix dedup: the SL(2,R) lift fixes the action on
                    // the fiber coordinate, so -A is not interchangeable with A.
                    if ((e.A - c).cwiseAbs().maxCoeff() < 1e-9) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) {
                    words.push_back({c, w.chi * g.chi});
                    next.push_back({c, w.chi * g.chi});
                }
            }
        }
        frontier = std::move(next);
    }
    return words;
}

std::vector<double> dijkstra(const Adjacency& adj, int src) {
    std::vector<double> d(adj.size(), std::numeric_limits<double>::infinity());
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>> pq;
    d[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        const auto [du, u] = pq.top();
        pq.pop();
        if (du > d[u]) continue;
        for (const auto& [v, w] : adj[u]) {
            const double nd = du + w;
            if (nd < d[v]) {
                d[v] = nd;
                pq.push({nd, v});
            }
        }
    }
    return d;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double SampledMetricSpace::diameter() const {
    double worst = 0.0;
    for (int i = 0; i < size(); ++i) {
        for (int j = i + 1; j < size(); ++j) worst = std::max(worst, dist(i, j));
    }
    return worst;
}

SampledMetricSpace build_space(const SurfaceModel& model, double t, const SampleSet& set,
                               int k_neighbors, std::vector<int> subset, int workers,
                               double length_scale, bool chord_edges,
                               const std::vector<int>* involution) {
    const MetricField field = closed_form_metric(model);
    const int n = set.size();
    if (subset.empty()) {
        subset.resize(n);
        for (int i = 0; i < n; ++i) subset[i] = i;
    }
    const int m = static_cast<int>(subset.size());

    std::vector<double> lens(set.edges.size());
    parallel_for(static_cast<int>(set.edges.size()), workers, [&](int e) {
        const SampleEdge& ed = set.edges[e];
        lens[e] = segment_length(field, set.points[ed.a].coords, ed.b_chart, set.chart, t);
    });

    // Keep, per node, the k shortest candidate edges; glued edges always.
    std::vector<std::vector<std::pair<double, int>>> cand(n);
    for (size_t e = 0; e < set.edges.size(); ++e) {
        cand[set.edges[e].a].push_back({lens[e], static_cast<int>(e)});
        cand[set.edges[e].b].push_back({lens[e], static_cast<int>(e)});
    }
    std::vector<char> keep(set.edges.size(), 0);
    for (int v = 0; v < n; ++v) {
        auto& c = cand[v];
        const int kk = std::min<size_t>(k_neighbors, c.size());
        std::partial_sort(c.begin(), c.begin() + kk, c.end());
        for (int i = 0; i < kk; ++i) keep[c[i].second] = 1;
    }
    for (size_t e = 0; e < set.edges.size(); ++e) {
        if (set.edges[e].glued) keep[e] = 1;
    }

    Adjacency adj(n);
    for (size_t e = 0; e < set.edges.size(); ++e) {
        if (!keep[e]) continue;
        adj[set.edges[e].a].push_back({set.edges[e].b, lens[e]});
        adj[set.edges[e].b].push_back({set.edges[e].a, lens[e]});
    }

    const bool inoue_chords = chord_edges && (model.family == Family::InoueSM ||
                                              model.family == Family::InoueSPlus ||
                                              model.family == Family::InoueSMinus);
    if (inoue_chords) {
        // Chords to lattice-word images of the target capture the dense-orbit
        // fiber shortcuts (small net x drift at small w cost).
        const std::vector<AffineZW> words = fiber_words(fiber_affines(model));
        std::vector<HermitianForm> gi;
        gi.reserve(m);
        for (int ii = 0; ii < m; ++ii) {
            gi.push_back(field.eval({set.points[subset[ii]].coords, set.chart}, t));
        }
        std::vector<double> clen(static_cast<size_t>(m) * m,
                                 std::numeric_limits<double>::infinity());
        parallel_for(m, workers, [&](int ii) {
            const std::vector<cd>& pa = set.points[subset[ii]].coords;
            const Eigen::MatrixXcd& G = gi[ii].g;
            for (int jj = ii + 1; jj < m; ++jj) {
                const std::vector<cd>& pb = set.points[subset[jj]].coords;
                double best = std::numeric_limits<double>::infinity();
                AffineZW bw;
                for (const AffineZW& w : words) {
                    const cd dz = pb[0] + w.A - pa[0];
                    const cd dw = pb[1] + w.B * pb[0] + w.C - pa[1];
                    const double q =
                        (G(0, 0) * std::norm(dz) + G(1, 1) * std::norm(dw) +
                         2.0 * (G(0, 1) * dz * std::conj(dw)).real())
                            .real();
                    if (q < best) {
                        best = q;
                        bw = w;
                    }
                }
                clen[static_cast<size_t>(ii) * m + jj] = segment_length(
                    field, pa, affine_apply(bw, set.points[subset[jj]].coords),
                    set.chart, t);
            }
        });
        auto at = [&](int ii, int jj) -> double& {
            return ii < jj ? clen[static_cast<size_t>(ii) * m + jj]
                           : clen[static_cast<size_t>(jj) * m + ii];
        };
        if (involution) {
            // Min-symmetrize over the involution: its continuum counterpart is
            // an exact isometry, so either pair's segment bounds both.
            const std::vector<int>& s = *involution;
            for (int ii = 0; ii < m; ++ii) {
                for (int jj = ii + 1; jj < m; ++jj) {
                    const double v = std::min(at(ii, jj), at(s[ii], s[jj]));
                    at(ii, jj) = v;
                    at(s[ii], s[jj]) = v;
                }
            }
        }
        // Per-node cap, closed under the involution so the graph stays
        // exactly equivariant.
        const int kc = std::min(32, m - 1);
        std::vector<char> ckeep(clen.size(), 0);
        for (int ii = 0; ii < m; ++ii) {
            std::vector<std::pair<double, int>> cand;
            cand.reserve(m - 1);
            for (int jj = 0; jj < m; ++jj) {
                if (jj != ii) cand.push_back({at(ii, jj), jj});
            }
            std::partial_sort(cand.begin(), cand.begin() + kc, cand.end());
            for (int c = 0; c < kc; ++c) {
                const int jj = cand[c].second;
                ckeep[static_cast<size_t>(std::min(ii, jj)) * m + std::max(ii, jj)] = 1;
            }
        }
        for (int ii = 0; ii < m; ++ii) {
            for (int jj = ii + 1; jj < m; ++jj) {
                bool keep_c = ckeep[static_cast<size_t>(ii) * m + jj];
                if (involution) {
                    const int si = (*involution)[ii], sj = (*involution)[jj];
                    keep_c = keep_c ||
                             ckeep[static_cast<size_t>(std::min(si, sj)) * m +
                                   std::max(si, sj)];
                }
                if (!keep_c) continue;
                adj[subset[ii]].push_back({subset[jj], at(ii, jj)});
                adj[subset[jj]].push_back({subset[ii], at(ii, jj)});
            }
        }
    } else if (chord_edges && model.family == Family::EllipticBundle) {
        // Explicit-path chords realize the quotient shortcuts through the base
        // polygon boundary, minimized over Fuchsian words and deck powers.
        // Along the hyperbolic base geodesic a lift with d log w = q dz / y
        // (constant q) costs sqrt(2 (c - 1 + |2q - i|^2)) d_H, since the base
        // slot of the metric is c / y^2 with constant c and the cross slot
        // couples base motion to fiber rotation; any leftover log-w gap is a
        // flat-cylinder fiber leg at ds = 2 sqrt(2) |d log w|.
        const std::vector<FuchsianWord> words = fuchsian_words(model, 3);
        const double lal = std::log(std::abs(model.ell_alpha));
        const double cc =
            field.eval({{cd(0.0, 1.0), cd(1.0, 0.0)}, set.chart}, t).g(0, 0).real();
        const double sc1 = std::sqrt(2.0 * (cc - 1.0));
        const double s22 = 2.0 * std::sqrt(2.0);
        std::vector<std::vector<std::pair<int, double>>> extra(m);
        parallel_for(m, workers, [&](int ii) {
            const std::vector<cd>& pa = set.points[subset[ii]].coords;
            for (int jj = ii + 1; jj < m; ++jj) {
                const std::vector<cd>& pb = set.points[subset[jj]].coords;
                double best = std::numeric_limits<double>::infinity();
                for (const FuchsianWord& wd : words) {
                    const cd den = wd.A(1, 0) * pb[0] + wd.A(1, 1);
                    const cd zq = (wd.A(0, 0) * pb[0] + wd.A(0, 1)) / den;
                    const double d = hyperbolic_distance(pa[0], zq);
                    if (sc1 * d >= best) continue;
                    const cd wq = den * wd.chi * pb[1];
                    // Holonomy integral int dz / y from zq to pa[0] along the
                    // geodesic (closed form on the circular arc).
                    cd hol;
                    const double x1 = zq.real(), y1 = zq.imag();
                    const double x2 = pa[0].real(), y2 = pa[0].imag();
                    if (std::abs(x1 - x2) < 1e-12) {
                        hol = cd(0.0, std::log(y2 / y1));
                    } else {
                        const double cx = (std::norm(zq) - std::norm(pa[0])) /
                                          (2.0 * (x1 - x2));
                        const double th1 = std::atan2(y1, x1 - cx);
                        const double th2 = std::atan2(y2, x2 - cx);
                        hol = cd(-(th2 - th1), std::log(std::sin(th2) / std::sin(th1)));
                    }
                    const int k0 = static_cast<int>(
                        std::lround(std::log(std::abs(wq / pa[1])) / lal));
                    for (int k = k0 - 1; k <= k0 + 1; ++k) {
                        const cd wk =
                            wq * std::pow(model.ell_alpha, static_cast<double>(-k));
                        const cd dl0 = std::log(pa[1] / wk);
                        for (int j = -1; j <= 1; ++j) {
                            const cd dl = dl0 + cd(0.0, 2.0 * M_PI * j);
                            best = std::min(
                                best, std::sqrt(2.0 * cc) * d + s22 * std::abs(dl));
                            best = std::min(
                                best, sc1 * d + s22 * std::abs(dl - 0.5 * kI * hol));
                            if (std::abs(hol) < 1e-9 || d < 1e-12) continue;
                            for (double s = 0.25; s < 1.01; s += 0.25) {
                                const cd q = s * dl / hol;
                                const double base =
                                    std::sqrt(2.0 * (cc - 1.0 +
                                                     std::norm(2.0 * q - kI))) * d;
                                best = std::min(
                                    best, base + s22 * (1.0 - s) * std::abs(dl));
                            }
                        }
                    }
                }
                extra[ii].push_back({jj, best});
            }
        });
        for (int ii = 0; ii < m; ++ii) {
            for (const auto& [jj, len] : extra[ii]) {
                adj[subset[ii]].push_back({subset[jj], len});
                adj[subset[jj]].push_back({subset[ii], len});
            }
        }
    } else if (chord_edges) {
        std::vector<std::vector<std::pair<int, double>>> extra(m);
        parallel_for(m, workers, [&](int ii) {
            for (int jj = ii + 1; jj < m; ++jj) {
                const int a = subset[ii], b = subset[jj];
                std::vector<cd> bc = set.points[b].coords;
                if (set.chart == Chart::TorusCell) {
                    // Minimize the straight segment over nearby lattice wraps.
                    const std::vector<cd>& ac = set.points[a].coords;
                    double best = std::numeric_limits<double>::infinity();
                    std::vector<cd> bestc = bc;
                    for (int k0 = -1; k0 <= 1; ++k0)
                        for (int k1 = -1; k1 <= 1; ++k1)
                            for (int k2 = -1; k2 <= 1; ++k2)
                                for (int k3 = -1; k3 <= 1; ++k3) {
                                    const Eigen::Vector4d sh =
                                        model.torus_lattice *
                                        Eigen::Vector4d(k0, k1, k2, k3);
                                    std::vector<cd> c = bc;
                                    c[0] += cd(sh[0], sh[1]);
                                    c[1] += cd(sh[2], sh[3]);
                                    const double d2 = std::norm(c[0] - ac[0]) +
                                                      std::norm(c[1] - ac[1]);
                                    if (d2 < best) {
                                        best = d2;
                                        bestc = c;
                                    }
                                }
                    bc = bestc;
                }
                extra[ii].push_back(
                    {jj, segment_length(field, set.points[a].coords, bc, set.chart, t)});
            }
        });
        for (int ii = 0; ii < m; ++ii) {
            for (const auto& [jj, len] : extra[ii]) {
                adj[subset[ii]].push_back({subset[jj], len});
                adj[subset[jj]].push_back({subset[ii], len});
            }
        }
    }

    SampledMetricSpace space;
    space.ids = subset;
    space.t = t;
    space.dist.resize(m, m);
    parallel_for(m, workers, [&](int ii) {
        const std::vector<double> d = dijkstra(adj, subset[ii]);
        for (int jj = 0; jj < m; ++jj) space.dist(ii, jj) = d[subset[jj]];
    });
    for (int i = 0; i < m; ++i) {
        space.dist(i, i) = 0.0;
        for (int j = i + 1; j < m; ++j) {
            if (!std::isfinite(space.dist(i, j)) || !std::isfinite(space.dist(j, i))) {
                throw DisconnectedGraph("build_space: sample graph is disconnected");
            }
            const double s = std::min(space.dist(i, j), space.dist(j, i));
            space.dist(i, j) = s * length_scale;
            space.dist(j, i) = s * length_scale;
        }
    }
    return space;
}

int ReferenceSpace::size() const {
    return kind == Kind::Circle ? static_cast<int>(circle_pts.size())
                                : static_cast<int>(hyp_pts.size());
}

double hyperbolic_distance(cd z1, cd z2) {
    const double y1 = z1.imag(), y2 = z2.imag();
    return std::acosh(1.0 + std::norm(z1 - z2) / (2.0 * y1 * y2));
}

double ReferenceSpace::distance(int u, int v) const {
    if (kind == Kind::Circle) {
        double d = std::abs(circle_pts[u] - circle_pts[v]);
        d = std::min(d, 1.0 - d);
        return d * circumference();
    }
    const cd z1 = hyp_pts[u];
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::Matrix2d& A : group) {
        const cd z2 = (A(0, 0) * hyp_pts[v] + A(0, 1)) / (A(1, 0) * hyp_pts[v] + A(1, 1));
        best = std::min(best, hyperbolic_distance(z1, z2));
    }
    return best;
}

ReferenceSpace circle_reference(double radius, int samples) {
    ReferenceSpace ref;
    ref.kind = ReferenceSpace::Kind::Circle;
    ref.radius = radius;
    for (int i = 0; i < samples; ++i) {
        ref.circle_pts.push_back(static_cast<double>(i) / samples);
    }
    return ref;
}

ReferenceSpace hopf_circle_reference(const SurfaceModel& model, int samples) {
    if (model.family != Family::Hopf) {
        throw FamilyMismatch("hopf_circle_reference: not a Hopf model");
    }
    return circle_reference(std::log(model.alpha) / (std::sqrt(2.0) * M_PI), samples);
}

ReferenceSpace inoue_circle_reference(const SurfaceModel& model, int samples) {
    const double la = std::log(model.alpha);
    switch (model.family) {
        case Family::InoueSM:
            return circle_reference(la / (2.0 * std::sqrt(2.0) * M_PI), samples);
        case Family::InoueSPlus:
            return circle_reference(la / (2.0 * M_PI), samples);
        case Family::InoueSMinus:
            return circle_reference(la / M_PI, samples);
        default:
            throw FamilyMismatch("inoue_circle_reference: not an Inoue model");
    }
}

ReferenceSpace hyperbolic_reference(const SurfaceModel& model,
                                    const std::vector<cd>& base_points, int word_len) {
    if (model.family != Family::EllipticBundle) {
        throw FamilyMismatch("hyperbolic_reference: not an elliptic model");
    }
    ReferenceSpace ref;
    ref.kind = ReferenceSpace::Kind::Hyperbolic;
    ref.hyp_pts = base_points;
    for (const FuchsianWord& w : fuchsian_words(model, word_len)) {
        ref.group.push_back(w.A);
    }
    return ref;
}

Correspondence circle_correspondence(const SampledMetricSpace& X, const SampleSet& set,
                                     const ReferenceSpace& ref) {
    const int M = ref.size();
    Correspondence corr;
    corr.F.resize(X.size());
    for (int i = 0; i < X.size(); ++i) {
        const double c = set.circle_coord[X.ids[i]];
        int idx = static_cast<int>(std::floor(c * M + 0.5)) % M;
        corr.F[i] = idx;
    }
    corr.G.assign(M, 0);
    for (int u = 0; u < M; ++u) {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < X.size(); ++i) {
            double d = std::abs(set.circle_coord[X.ids[i]] - ref.circle_pts[u]);
            d = std::min(d, 1.0 - d);
            // Prefer a fixed transverse cell so G is close to a section.
            const double score = d + 1e-9 * set.cell[X.ids[i]];
            if (score < best) {
                best = score;
                corr.G[u] = i;
            }
        }
    }
    return corr;
}

double gh_upper_bound(const SampledMetricSpace& X, const ReferenceSpace& ref,
                      const Correspondence& corr) {
    double eps = 0.0;
    const int m = X.size();
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            eps = std::max(eps,
                           std::abs(X.dist(i, j) - ref.distance(corr.F[i], corr.F[j])));
        }
        eps = std::max(eps, X.dist(i, corr.G[corr.F[i]]));
    }
    const int M = ref.size();
    for (int u = 0; u < M; ++u) {
        for (int v = u + 1; v < M; ++v) {
            eps = std::max(eps,
                           std::abs(ref.distance(u, v) - X.dist(corr.G[u], corr.G[v])));
        }
        eps = std::max(eps, ref.distance(u, corr.F[corr.G[u]]));
    }
    return eps;
}

double equivariant_gh_upper_bound(const SampledMetricSpace& X, const ReferenceSpace& ref,
                                  const Correspondence& corr,
                                  const std::vector<int>& sigma_X,
                                  const std::vector<int>& sigma_Y) {
    double eps = gh_upper_bound(X, ref, corr);
    for (int i = 0; i < X.size(); ++i) {
        eps = std::max(eps, ref.distance(corr.F[sigma_X[i]], sigma_Y[corr.F[i]]));
    }
    for (int u = 0; u < ref.size(); ++u) {
        eps = std::max(eps, X.dist(corr.G[sigma_Y[u]], sigma_X[corr.G[u]]));
    }
    return eps;
}

SampledMetricSpace equivariant_quotient(const SampledMetricSpace& X,
                                        const std::vector<int>& sigma, double tol) {
    const int m = X.size();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (std::abs(X.dist(sigma[i], sigma[j]) - X.dist(i, j)) > tol) {
                throw NotAnIsometry("equivariant_quotient: involution distorts distances");
            }
        }
    }
    std::vector<int> reps;
    for (int i = 0; i < m; ++i) {
        if (i <= sigma[i]) reps.push_back(i);
    }
    SampledMetricSpace q;
    q.t = X.t;
    q.dist.resize(reps.size(), reps.size());
    for (size_t a = 0; a < reps.size(); ++a) {
        q.ids.push_back(X.ids[reps[a]]);
        for (size_t b = 0; b < reps.size(); ++b) {
            q.dist(a, b) =
                std::min(X.dist(reps[a], reps[b]), X.dist(reps[a], sigma[reps[b]]));
        }
    }
    return q;
}

double fiber_collapse_rate(const SurfaceModel& model, double t, const SampleSet& set,
                           int shell, double max_angle_deg, int workers) {
    if (model.family != Family::Hopf) {
        throw FamilyMismatch("fiber_collapse_rate: not a Hopf model");
    }
    if (t < 0.0 || t >= max_existence_time(model)) {
        throw TimeOutOfRange("fiber_collapse_rate: t outside [0, T)");
    }
    const MetricField field = closed_form_metric(model);
    const double sin_max = std::sin(max_angle_deg * M_PI / 180.0);

    std::vector<int> shell_pts;
    std::vector<int> local(set.size(), -1);
    for (int i = 0; i < set.size(); ++i) {
        if (set.layer[i] == shell) {
            local[i] = static_cast<int>(shell_pts.size());
            shell_pts.push_back(i);
        }
    }
    // The sampler's graph is too sparse once restricted to near-contact
    // directions, so build a denser k-nearest graph on the shell and filter it.
    const int m = static_cast<int>(shell_pts.size());
    const int k_fiber = std::min(40, m - 1);
    Adjacency adj(shell_pts.size());
    for (int s = 0; s < m; ++s) {
        const std::vector<cd>& a = set.points[shell_pts[s]].coords;
        std::vector<std::pair<double, int>> cand;
        for (int u = 0; u < m; ++u) {
            if (u == s) continue;
            const std::vector<cd>& b = set.points[shell_pts[u]].coords;
            double d2 = 0.0;
            for (size_t i = 0; i < a.size(); ++i) d2 += std::norm(b[i] - a[i]);
            cand.push_back({d2, u});
        }
        std::partial_sort(cand.begin(), cand.begin() + k_fiber, cand.end());
        for (int c = 0; c < k_fiber; ++c) {
            const int u = cand[c].second;
            if (u < s) continue;  // added once from the smaller endpoint
            const std::vector<cd>& b = set.points[shell_pts[u]].coords;
            cd ip = 0.0;
            double na = 0.0, nv = 0.0;
            for (size_t i = 0; i < a.size(); ++i) {
                const cd v = b[i] - a[i];
                ip += std::conj(a[i]) * v;
                na += std::norm(a[i]);
                nv += std::norm(v);
            }
            const double sin_theta = std::abs(ip.imag()) / std::sqrt(na * nv);
            if (sin_theta > sin_max) continue;
            // Arc-projected length: straight chords leak into the radial
            // direction, which does not collapse; integrate along the shell.
            const double r = std::sqrt(na);
            const int segs = 6;
            std::vector<cd> prev = a;
            double len = 0.0;
            for (int j = 1; j <= segs; ++j) {
                std::vector<cd> q(a.size());
                double nq = 0.0;
                for (size_t i = 0; i < a.size(); ++i) {
                    q[i] = a[i] + (static_cast<double>(j) / segs) * (b[i] - a[i]);
                    nq += std::norm(q[i]);
                }
                const double scale = r / std::sqrt(nq);
                for (cd& x : q) x *= scale;
                len += segment_length(field, prev, q, set.chart, t);
                prev = q;
            }
            adj[s].push_back({u, len});
            adj[u].push_back({s, len});
        }
    }
    std::vector<double> diam(shell_pts.size(), 0.0);
    std::atomic<bool> disconnected{false};
    parallel_for(static_cast<int>(shell_pts.size()), workers, [&](int s) {
        const std::vector<double> d = dijkstra(adj, s);
        for (double v : d) {
            if (!std::isfinite(v)) {
                disconnected = true;
                return;
            }
            diam[s] = std::max(diam[s], v);
        }
    });
    if (disconnected) {
        throw DisconnectedGraph("fiber_collapse_rate: contact-filtered graph disconnected");
    }
    return *std::max_element(diam.begin(), diam.end());
}

void write_distance_matrix(const std::string& path, const Eigen::MatrixXd& dist) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("write_distance_matrix: cannot open " + path);
    const std::uint64_t n = static_cast<std::uint64_t>(dist.rows());
    std::fwrite(&n, sizeof(n), 1, f);
    for (int i = 0; i < dist.rows(); ++i) {
        for (int j = 0; j < dist.cols(); ++j) {
            const double v = dist(i, j);
            std::fwrite(&v, sizeof(v), 1, f);
        }
    }
    std::fclose(f);
}

}  // namespace crf
