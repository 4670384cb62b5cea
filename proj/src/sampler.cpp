#include "crf/sampler.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "crf/errors.h"

namespace crf {

namespace {

constexpr cd kI{0.0, 1.0};

void check_budget(long long npoints) {
    if (npoints > 2000000LL) {
        throw BudgetExceeded("sampler: point budget of 2e6 exceeded");
    }
}

/// Indices of the k nearest other rows of emb (brute force).
std::vector<std::vector<int>> knn_lists(const std::vector<Eigen::VectorXd>& emb, int k) {
    const int n = static_cast<int>(emb.size());
    std::vector<std::vector<int>> out(n);
    std::vector<std::pair<double, int>> d(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) d[j] = {(emb[i] - emb[j]).squaredNorm(), j};
        d[i].first = std::numeric_limits<double>::infinity();
        const int kk = std::min(k, n - 1);
        std::partial_sort(d.begin(), d.begin() + kk, d.end());
        for (int j = 0; j < kk; ++j) out[i].push_back(d[j].second);
    }
    return out;
}

SampleSet sample_hopf(const SurfaceModel& model, const SamplerParams& par) {
    const int n = model.n;
    const int S = par.shells, D = par.directions;
    check_budget(static_cast<long long>(S) * D);
    // Work with contraction factors of modulus > 1 (invert gamma if needed).
    std::vector<cd> al = model.hopf_alpha;
    if (std::abs(al[0]) < 1.0) {
        for (cd& a : al) a = 1.0 / a;
    }
    const double mod = std::abs(al[0]);

    std::mt19937_64 rng(par.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<cd>> dirs(D, std::vector<cd>(n));
    std::vector<Eigen::VectorXd> emb(D, Eigen::VectorXd(2 * n));
    for (int d = 0; d < D; ++d) {
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            dirs[d][i] = cd(gauss(rng), gauss(rng));
            norm2 += std::norm(dirs[d][i]);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < n; ++i) {
            dirs[d][i] *= inv;
            emb[d][2 * i] = dirs[d][i].real();
            emb[d][2 * i + 1] = dirs[d][i].imag();
        }
    }
    const auto nbrs = knn_lists(emb, par.knn);

    // Area of the unit sphere S^{2n-1}: 2 pi^n / (n-1)!.
    double area = 2.0 * std::pow(M_PI, n);
    for (int i = 2; i < n; ++i) area /= i;

    SampleSet set;
    set.chart = Chart::PuncturedCn;
    const double step = std::log(mod) / S;
    for (int s = 0; s < S; ++s) {
        const double r = std::exp(s * step);
        for (int d = 0; d < D; ++d) {
            std::vector<cd> z(n);
            for (int i = 0; i < n; ++i) z[i] = r * dirs[d][i];
            set.points.push_back({z, Chart::PuncturedCn});
            set.weights.push_back(std::pow(r, 2 * n - 1) * (r * step) * area / D);
            set.layer.push_back(s);
            set.cell.push_back(d);
            set.circle_coord.push_back(static_cast<double>(s) / S);
        }
    }
    auto idx = [D](int s, int d) { return s * D + d; };
    for (int s = 0; s < S; ++s) {
        for (int d = 0; d < D; ++d) {
            for (int e : nbrs[d]) {
                if (e > d) {
                    set.edges.push_back(
                        {idx(s, d), idx(s, e), set.points[idx(s, e)].coords, false});
                }
            }
            if (s + 1 < S) {
                set.edges.push_back(
                    {idx(s, d), idx(s + 1, d), set.points[idx(s + 1, d)].coords, false});
            } else {
                // Continuation above the top shell is gamma applied to shell 0:
                // match the image direction nearest to this radial line.
                std::vector<cd> ct(n);
                for (int i = 0; i < n; ++i) ct[i] = mod * dirs[d][i];
                int best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (int e = 0; e < D; ++e) {
                    double acc = 0.0;
                    for (int i = 0; i < n; ++i) acc += std::norm(al[i] * dirs[e][i] - ct[i]);
                    if (acc < bd) {
                        bd = acc;
                        best = e;
                    }
                }
                std::vector<cd> bc(n);
                for (int i = 0; i < n; ++i) bc[i] = al[i] * dirs[best][i];
                set.edges.push_back({idx(s, d), idx(0, best), bc, true});
            }
        }
    }
    return set;
}

SampleSet sample_sm(const SurfaceModel& model, const SamplerParams& par) {
    const int L = par.layers, G = par.grid;
    const long long fib = static_cast<long long>(G) * G * G;
    check_budget(L * fib);
    const double alpha = model.alpha;
    Eigen::Matrix3d L3;
    for (int j = 0; j < 3; ++j) {
        L3(0, j) = model.sm_a[j];
        L3(1, j) = model.sm_b[j].real();
        L3(2, j) = model.sm_b[j].imag();
    }
    const Eigen::Matrix3d L3inv = L3.inverse();
    const double cellw = std::abs(L3.determinant()) / fib;

    SampleSet set;
    set.chart = Chart::HalfPlaneC;
    const double step = std::log(alpha) / L;
    auto flat = [G](int g1, int g2, int g3) { return (g1 * G + g2) * G + g3; };
    auto coords_of = [&](double y, const Eigen::Vector3d& s) {
        const Eigen::Vector3d v = L3 * s;
        return std::vector<cd>{cd(v[0], y), cd(v[1], v[2])};
    };
    for (int i = 0; i < L; ++i) {
        const double y = std::exp(i * step);
        for (int g1 = 0; g1 < G; ++g1) {
            for (int g2 = 0; g2 < G; ++g2) {
                for (int g3 = 0; g3 < G; ++g3) {
                    const Eigen::Vector3d s(static_cast<double>(g1) / G,
                                            static_cast<double>(g2) / G,
                                            static_cast<double>(g3) / G);
                    set.points.push_back({coords_of(y, s), Chart::HalfPlaneC});
                    set.weights.push_back(cellw * y * step);
                    set.layer.push_back(i);
                    set.cell.push_back(flat(g1, g2, g3));
                    set.circle_coord.push_back(static_cast<double>(i) / L);
                }
            }
        }
    }
    auto idx = [&](int i, int c) { return static_cast<int>(i * fib + c); };
    for (int i = 0; i < L; ++i) {
        for (int g1 = 0; g1 < G; ++g1) {
            for (int g2 = 0; g2 < G; ++g2) {
                for (int g3 = 0; g3 < G; ++g3) {
                    const int a = idx(i, flat(g1, g2, g3));
                    const int gg[3] = {g1, g2, g3};
                    for (int j = 0; j < 3; ++j) {
                        int nb[3] = {g1, g2, g3};
                        nb[j] = gg[j] + 1;
                        if (nb[j] < G) {
                            const int b = idx(i, flat(nb[0], nb[1], nb[2]));
                            set.edges.push_back({a, b, set.points[b].coords, false});
                        } else {
                            nb[j] = 0;
                            const int b = idx(i, flat(nb[0], nb[1], nb[2]));
                            std::vector<cd> bc = set.points[b].coords;
                            bc[0] += model.sm_a[j];
                            bc[1] += model.sm_b[j];
                            set.edges.push_back({a, b, bc, true});
                        }
                    }
                    if (i + 1 < L) {
                        const int b = idx(i + 1, flat(g1, g2, g3));
                        set.edges.push_back({a, b, set.points[b].coords, false});
                    } else {
                        // Continuation to y = alpha, pulled back through f0.
                        const Eigen::Vector3d s(static_cast<double>(g1) / G,
                                                static_cast<double>(g2) / G,
                                                static_cast<double>(g3) / G);
                        std::vector<cd> ct = coords_of(alpha, s);
                        const cd qz = ct[0] / alpha;
                        const cd qw = ct[1] / model.sm_beta;
                        const Eigen::Vector3d v(qz.real(), qw.real(), qw.imag());
                        Eigen::Vector3d sq = L3inv * v;
                        Eigen::Vector3d k;
                        int gi[3];
                        for (int j = 0; j < 3; ++j) {
                            k[j] = std::floor(sq[j]);
                            double frac = sq[j] - k[j];
                            gi[j] = static_cast<int>(std::floor(frac * G + 0.5));
                            if (gi[j] >= G) gi[j] = G - 1;
                        }
                        const int b = idx(0, flat(gi[0], gi[1], gi[2]));
                        std::vector<cd> bs = set.points[b].coords;
                        for (int j = 0; j < 3; ++j) {
                            bs[0] += k[j] * model.sm_a[j];
                            bs[1] += k[j] * model.sm_b[j];
                        }
                        std::vector<cd> bc{alpha * bs[0], model.sm_beta * bs[1]};
                        set.edges.push_back({a, b, bc, true});
                    }
                }
            }
        }
    }
    return set;
}

/// Malcev-coordinate point of the S+ fiber lattice at level y.
std::vector<cd> splus_phi(const SurfaceModel& m, double y, const Eigen::Vector3d& s) {
    const double x = s[0] * m.in_a[0] + s[1] * m.in_a[1];
    const double u = s[0] * m.in_c[0] + s[1] * m.in_c[1] + s[2] * m.in_kappa;
    const double v = (s[0] * m.in_b[0] + s[1] * m.in_b[1]) * y + m.in_m * std::log(y);
    return {cd(x, y), cd(u, v)};
}

/// f_j^k for the S+ lattice generators, closed form in the power k.
void splus_fj_pow(const SurfaceModel& m, int j, double k, cd& z, cd& w) {
    const double a = m.in_a[j], b = m.in_b[j], c = m.in_c[j];
    w += k * b * z + 0.5 * k * (k - 1.0) * a * b + k * c;
    z += k * a;
}

struct SplusWord {
    double k1 = 0, k2 = 0, k3 = 0;
};

void splus_word_apply(const SurfaceModel& m, const SplusWord& wd, cd& z, cd& w) {
    w += wd.k3 * m.in_kappa;
    splus_fj_pow(m, 1, wd.k2, z, w);
    splus_fj_pow(m, 0, wd.k1, z, w);
}

/// Reduce a point of H x C into the Malcev cell [0,1)^3 at its y level,
/// returning the cell coordinates and the lattice word that restores it.
Eigen::Vector3d splus_reduce(const SurfaceModel& m, cd z, cd w, SplusWord& wd) {
    const double y = z.imag();
    Eigen::Matrix2d A;
    A << m.in_a[0], m.in_a[1],
         m.in_b[0] * y, m.in_b[1] * y;
    const double V = w.imag() - m.in_m * std::log(y);
    Eigen::Vector2d sig = A.inverse() * Eigen::Vector2d(z.real(), V);
    wd.k1 = std::floor(sig[0]);
    wd.k2 = std::floor(sig[1]);
    splus_fj_pow(m, 0, -wd.k1, z, w);
    splus_fj_pow(m, 1, -wd.k2, z, w);
    sig = A.inverse() * Eigen::Vector2d(z.real(), w.imag() - m.in_m * std::log(y));
    const double s3raw = (w.real() - sig[0] * m.in_c[0] - sig[1] * m.in_c[1]) / m.in_kappa;
    wd.k3 = std::floor(s3raw);
    return Eigen::Vector3d(sig[0], sig[1], s3raw - wd.k3);
}

int nearest_cell_index(double s, int G) {
    int g = static_cast<int>(std::floor(s * G + 0.5));
    if (g >= G) g = G - 1;
    if (g < 0) g = 0;
    return g;
}

/// Structured sampler of one S+ surface over circle scale `alpha` with L
/// layers.  Shared by the S+ sampler and the S- double cover.
SampleSet sample_splus_layers(const SurfaceModel& m, int L, int G, double alpha) {
    const long long fib = static_cast<long long>(G) * G * G;
    check_budget(L * fib);
    SampleSet set;
    set.chart = Chart::HalfPlaneC;
    const double step = std::log(alpha) / L;
    auto flat = [G](int g1, int g2, int g3) { return (g1 * G + g2) * G + g3; };
    for (int i = 0; i < L; ++i) {
        const double y = std::exp(i * step);
        Eigen::Matrix3d J3;
        J3 << m.in_a[0], m.in_a[1], 0.0,
              m.in_c[0], m.in_c[1], m.in_kappa,
              m.in_b[0] * y, m.in_b[1] * y, 0.0;
        const double cellw = std::abs(J3.determinant()) / fib;
        for (int g1 = 0; g1 < G; ++g1) {
            for (int g2 = 0; g2 < G; ++g2) {
                for (int g3 = 0; g3 < G; ++g3) {
                    const Eigen::Vector3d s(static_cast<double>(g1) / G,
                                            static_cast<double>(g2) / G,
                                            static_cast<double>(g3) / G);
                    set.points.push_back({splus_phi(m, y, s), Chart::HalfPlaneC});
                    set.weights.push_back(cellw * y * step);
                    set.layer.push_back(i);
                    set.cell.push_back(flat(g1, g2, g3));
                    set.circle_coord.push_back(static_cast<double>(i) / L);
                }
            }
        }
    }
    return set;
}

/// Fiber-direction and interior layer edges for layers [0, L) of a set laid
/// out by sample_splus_layers.  Layer edges stop before layer top_layer.
void splus_grid_edges(const SurfaceModel& m, SampleSet& set, int L, int G,
                      double step, int top_layer) {
    const long long fib = static_cast<long long>(G) * G * G;
    auto flat = [G](int g1, int g2, int g3) { return (g1 * G + g2) * G + g3; };
    auto idx = [&](int i, int c) { return static_cast<int>(i * fib + c); };
    for (int i = 0; i < L; ++i) {
        const double y = std::exp(i * step);
        for (int g1 = 0; g1 < G; ++g1) {
            for (int g2 = 0; g2 < G; ++g2) {
                for (int g3 = 0; g3 < G; ++g3) {
                    const int a = idx(i, flat(g1, g2, g3));
                    const int gg[3] = {g1, g2, g3};
                    for (int j = 0; j < 3; ++j) {
                        int nb[3] = {g1, g2, g3};
                        nb[j] = gg[j] + 1;
                        if (nb[j] < G) {
                            const int b = idx(i, flat(nb[0], nb[1], nb[2]));
                            set.edges.push_back({a, b, set.points[b].coords, false});
                        } else {
                            Eigen::Vector3d s(static_cast<double>(g1) / G,
                                              static_cast<double>(g2) / G,
                                              static_cast<double>(g3) / G);
                            s[j] = 1.0;
                            const std::vector<cd> ct = splus_phi(m, y, s);
                            SplusWord wd;
                            const Eigen::Vector3d sr = splus_reduce(m, ct[0], ct[1], wd);
                            const int b = idx(i, flat(nearest_cell_index(sr[0], G),
                                                      nearest_cell_index(sr[1], G),
                                                      nearest_cell_index(sr[2], G)));
                            cd bz = set.points[b].coords[0], bw = set.points[b].coords[1];
                            splus_word_apply(m, wd, bz, bw);
                            set.edges.push_back({a, b, {bz, bw}, true});
                        }
                    }
                    if (i + 1 < top_layer) {
                        const int b = idx(i + 1, flat(g1, g2, g3));
                        set.edges.push_back({a, b, set.points[b].coords, false});
                    }
                }
            }
        }
    }
}

SampleSet sample_splus(const SurfaceModel& m, const SamplerParams& par) {
    const int L = par.layers, G = par.grid;
    const double alpha = m.alpha;
    SampleSet set = sample_splus_layers(m, L, G, alpha);
    const double step = std::log(alpha) / L;
    splus_grid_edges(m, set, L, G, step, L);
    // Top wrap through f0: (z, w) -> (alpha z, w + t).
    const long long fib = static_cast<long long>(G) * G * G;
    auto flat = [G](int g1, int g2, int g3) { return (g1 * G + g2) * G + g3; };
    for (int g1 = 0; g1 < G; ++g1) {
        for (int g2 = 0; g2 < G; ++g2) {
            for (int g3 = 0; g3 < G; ++g3) {
                const int a = static_cast<int>((L - 1) * fib + flat(g1, g2, g3));
                const Eigen::Vector3d s(static_cast<double>(g1) / G,
                                        static_cast<double>(g2) / G,
                                        static_cast<double>(g3) / G);
                const std::vector<cd> ct = splus_phi(m, alpha, s);
                cd qz = ct[0] / alpha;
                cd qw = ct[1] - m.in_t;
                SplusWord wd;
                const Eigen::Vector3d sr = splus_reduce(m, qz, qw, wd);
                const int b = flat(nearest_cell_index(sr[0], G),
                                   nearest_cell_index(sr[1], G),
                                   nearest_cell_index(sr[2], G));
                cd bz = set.points[b].coords[0], bw = set.points[b].coords[1];
                splus_word_apply(m, wd, bz, bw);
                set.edges.push_back({a, b, {alpha * bz, bw + m.in_t}, true});
            }
        }
    }
    return set;
}

SampleSet sample_sminus_cover(const SurfaceModel& sminus, const SamplerParams& par) {
    const SurfaceModel cover = sminus_double_cover(sminus);
    const int L = par.layers, G = par.grid;
    const double al = sminus.alpha;  // cover.alpha = al^2
    const long long fib = static_cast<long long>(G) * G * G;
    check_budget(2LL * L * fib);
    const double step = std::log(al) / L;  // = log(cover.alpha) / (2L)

    SampleSet set = sample_splus_layers(cover, L, G, al);
    // Lower half spans half of the cover circle.
    for (double& c : set.circle_coord) c *= 0.5;
    // Upper half: exact images under the covering involution iota(z,w) = (al z, -w).
    const int half = set.size();
    for (int i = 0; i < half; ++i) {
        const std::vector<cd>& p = set.points[i].coords;
        set.points.push_back({{al * p[0], -p[1]}, Chart::HalfPlaneC});
        set.weights.push_back(set.weights[i] * al);
        set.layer.push_back(set.layer[i] + L);
        set.cell.push_back(set.cell[i]);
        set.circle_coord.push_back(set.circle_coord[i] + 0.5);
    }
    set.involution.resize(set.size());
    for (int i = 0; i < half; ++i) {
        set.involution[i] = i + half;
        set.involution[i + half] = i;
    }

    splus_grid_edges(cover, set, L, G, step, L);
    // Seam: layer L-1 to the iota layer at y = al.
    auto flat = [G](int g1, int g2, int g3) { return (g1 * G + g2) * G + g3; };
    for (int g1 = 0; g1 < G; ++g1) {
        for (int g2 = 0; g2 < G; ++g2) {
            for (int g3 = 0; g3 < G; ++g3) {
                const int a = static_cast<int>((L - 1) * fib + flat(g1, g2, g3));
                const Eigen::Vector3d s(static_cast<double>(g1) / G,
                                        static_cast<double>(g2) / G,
                                        static_cast<double>(g3) / G);
                const std::vector<cd> ct = splus_phi(cover, al, s);
                cd qz = ct[0] / al;  // iota^{-1}
                cd qw = -ct[1];
                SplusWord wd;
                const Eigen::Vector3d sr = splus_reduce(cover, qz, qw, wd);
                const int b0 = flat(nearest_cell_index(sr[0], G),
                                    nearest_cell_index(sr[1], G),
                                    nearest_cell_index(sr[2], G));
                cd bz = set.points[b0].coords[0], bw = set.points[b0].coords[1];
                splus_word_apply(cover, wd, bz, bw);
                set.edges.push_back({a, b0 + half, {al * bz, -bw}, true});
            }
        }
    }
    // The other half of the edge set is the exact iota image of the first half.
    const size_t nedges = set.edges.size();
    for (size_t e = 0; e < nedges; ++e) {
        const SampleEdge& ed = set.edges[e];
        set.edges.push_back({set.involution[ed.a], set.involution[ed.b],
                             {al * ed.b_chart[0], -ed.b_chart[1]}, ed.glued});
    }
    return set;
}

SampleSet sample_elliptic(const SurfaceModel& m, const SamplerParams& par) {
    const int Nz = par.base_points, W = par.shells, P = par.w_phases;
    check_budget(static_cast<long long>(Nz) * W * P);
    cd dal = m.ell_alpha;
    if (std::abs(dal) < 1.0) dal = 1.0 / dal;
    const double mod = std::abs(dal);
    const double R = par.base_radius;

    std::mt19937_64 rng(par.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<cd> zs(Nz);
    std::vector<Eigen::VectorXd> emb(Nz, Eigen::VectorXd(2));
    zs[0] = kI;  // keep the center as an exact sample
    for (int i = 1; i < Nz; ++i) {
        const double rho = std::acosh(1.0 + uni(rng) * (std::cosh(R) - 1.0));
        const double th = 2.0 * M_PI * uni(rng);
        const cd zeta = std::tanh(rho / 2.0) * std::exp(kI * th);
        zs[i] = kI * (1.0 + zeta) / (1.0 - zeta);
    }
    for (int i = 0; i < Nz; ++i) {
        // Embed for kNN in a conformal disk model (monotone in hyperbolic distance
        // near the center region sampled here).
        const cd zeta = (zs[i] - kI) / (zs[i] + kI);
        emb[i][0] = zeta.real();
        emb[i][1] = zeta.imag();
    }
    const auto nbrs = knn_lists(emb, par.knn);

    SampleSet set;
    set.chart = Chart::HalfPlaneCStar;
    const double zcellw = 2.0 * M_PI * (std::cosh(R) - 1.0) / Nz;
    const double wstep = std::log(mod) / W;
    auto idx = [&](int k, int p, int zi) { return (k * P + p) * Nz + zi; };
    for (int k = 0; k < W; ++k) {
        const double rw = std::exp(k * wstep);
        for (int p = 0; p < P; ++p) {
            const cd w = rw * std::exp(kI * (2.0 * M_PI * p / P));
            for (int zi = 0; zi < Nz; ++zi) {
                const double y = zs[zi].imag();
                set.points.push_back({{zs[zi], w}, Chart::HalfPlaneCStar});
                set.weights.push_back(zcellw * y * y * rw * rw * wstep * 2.0 * M_PI / P);
                set.layer.push_back(k);
                set.cell.push_back(p * Nz + zi);
                set.circle_coord.push_back(static_cast<double>(k) / W);
            }
        }
    }
    for (int k = 0; k < W; ++k) {
        for (int p = 0; p < P; ++p) {
            for (int zi = 0; zi < Nz; ++zi) {
                const int a = idx(k, p, zi);
                for (int nb : nbrs[zi]) {
                    if (nb > zi) {
                        set.edges.push_back(
                            {a, idx(k, p, nb), set.points[idx(k, p, nb)].coords, false});
                    }
                }
                const int b = idx(k, (p + 1) % P, zi);
                set.edges.push_back({a, b, set.points[b].coords, false});
                if (k + 1 < W) {
                    const int c = idx(k + 1, p, zi);
                    set.edges.push_back({a, c, set.points[c].coords, false});
                } else {
                    // Continuation past |w| = mod through the deck map w -> alpha w.
                    const cd ct = std::exp(kI * (2.0 * M_PI * p / P)) * mod;
                    int bp = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    for (int q = 0; q < P; ++q) {
                        const cd cand = dal * std::exp(kI * (2.0 * M_PI * q / P));
                        if (std::abs(cand - ct) < bd) {
                            bd = std::abs(cand - ct);
                            bp = q;
                        }
                    }
                    const int c = idx(0, bp, zi);
                    set.edges.push_back(
                        {a, c, {zs[zi], dal * set.points[c].coords[1]}, true});
                }
            }
        }
    }
    return set;
}

SampleSet sample_torus(const SurfaceModel& m, const SamplerParams& par) {
    const int G = par.grid;
    const long long total = static_cast<long long>(G) * G * G * G;
    check_budget(total);
    SampleSet set;
    set.chart = Chart::TorusCell;
    const double cellw = std::abs(m.torus_lattice.determinant()) / total;
    std::vector<int> g(4);
    for (int g0 = 0; g0 < G; ++g0)
        for (int g1 = 0; g1 < G; ++g1)
            for (int g2 = 0; g2 < G; ++g2)
                for (int g3 = 0; g3 < G; ++g3) {
                    const Eigen::Vector4d s(static_cast<double>(g0) / G,
                                            static_cast<double>(g1) / G,
                                            static_cast<double>(g2) / G,
                                            static_cast<double>(g3) / G);
                    const Eigen::Vector4d v = m.torus_lattice * s;
                    set.points.push_back(
                        {{cd(v[0], v[1]), cd(v[2], v[3])}, Chart::TorusCell});
                    set.weights.push_back(cellw);
                    set.layer.push_back(0);
                    set.cell.push_back(((g0 * G + g1) * G + g2) * G + g3);
                    set.circle_coord.push_back(0.0);
                }
    auto flat = [G](const int* q) { return ((q[0] * G + q[1]) * G + q[2]) * G + q[3]; };
    for (int g0 = 0; g0 < G; ++g0)
        for (int g1 = 0; g1 < G; ++g1)
            for (int g2 = 0; g2 < G; ++g2)
                for (int g3 = 0; g3 < G; ++g3) {
                    const int gg[4] = {g0, g1, g2, g3};
                    const int a = flat(gg);
                    for (int d = 0; d < 4; ++d) {
                        int nb[4] = {g0, g1, g2, g3};
                        ++nb[d];
                        const bool wrap = nb[d] == G;
                        if (wrap) nb[d] = 0;
                        const int b = flat(nb);
                        std::vector<cd> bc = set.points[b].coords;
                        if (wrap) {
                            const Eigen::Vector4d v = m.torus_lattice.col(d);
                            bc[0] += cd(v[0], v[1]);
                            bc[1] += cd(v[2], v[3]);
                        }
                        set.edges.push_back({a, b, bc, wrap});
                    }
                }
    return set;
}

}  // namespace

SampleSet sample_fundamental_domain(const SurfaceModel& model, const SamplerParams& par) {
    switch (model.family) {
        case Family::Hopf: return sample_hopf(model, par);
        case Family::InoueSM: return sample_sm(model, par);
        case Family::InoueSPlus: return sample_splus(model, par);
        case Family::InoueSMinus: return sample_sminus_cover(model, par);
        case Family::EllipticBundle: return sample_elliptic(model, par);
        case Family::Torus: return sample_torus(model, par);
    }
    return {};
}

}  // namespace crf
