#include "crf/models.h"

#include <cmath>
#include <limits>

#include "crf/errors.h"

namespace crf {

namespace {

constexpr cd kI{0.0, 1.0};

/// Scale a real eigenvector to unit norm with first nonzero component positive.
template <typename Vec>
void normalize_real(Vec& v) {
    v.normalize();
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0) v = -v;
            break;
        }
    }
}

void normalize_complex(Eigen::Vector3cd& v) {
    v.normalize();
    cd lead = v[0];
    if (std::abs(lead) > 1e-12) v *= std::conj(lead) / std::abs(lead);
}

Eigen::MatrixXcd diag2(cd a, cd b) {
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2, 2);
    j(0, 0) = a;
    j(1, 1) = b;
    return j;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Hopf: return "hopf";
        case Family::InoueSM: return "inoue_sm";
        case Family::InoueSPlus: return "inoue_splus";
        case Family::InoueSMinus: return "inoue_sminus";
        case Family::EllipticBundle: return "elliptic";
        case Family::Torus: return "torus";
    }
    return "unknown";
}

SurfaceModel hopf_model(int n, const std::vector<cd>& alphas) {
    if (n < 2 || static_cast<int>(alphas.size()) != n) {
        throw InvalidModelParameters("hopf: need n >= 2 contraction factors");
    }
    const double mod = std::abs(alphas[0]);
    for (const cd& a : alphas) {
        if (std::abs(std::abs(a) - mod) > 1e-10) {
            throw InvalidModelParameters("hopf: |alpha_i| must all be equal");
        }
    }
    if (std::abs(mod - 1.0) < 1e-10) {
        throw InvalidModelParameters("hopf: |alpha| must differ from 1");
    }
    SurfaceModel m;
    m.family = Family::Hopf;
    m.n = n;
    m.chart = Chart::PuncturedCn;
    m.hopf_alpha = alphas;
    m.alpha = mod > 1.0 ? mod : 1.0 / mod;
    return m;
}

SurfaceModel hopf_default(int n) {
    return hopf_model(n, std::vector<cd>(n, cd(2.0, 0.0)));
}

SurfaceModel inoue_sm_model(const Eigen::Matrix3d& M) {
    if (std::abs(M.determinant() - 1.0) > 1e-9) {
        throw InvalidModelParameters("inoue_sm: M must have determinant 1");
    }
    Eigen::EigenSolver<Eigen::Matrix3d> es(M);
    SurfaceModel m;
    m.family = Family::InoueSM;
    m.n = 2;
    m.chart = Chart::HalfPlaneC;
    m.sm_M = M;
    int real_idx = -1, cplx_idx = -1;
    for (int i = 0; i < 3; ++i) {
        const cd lam = es.eigenvalues()[i];
        if (std::abs(lam.imag()) < 1e-10) {
            real_idx = i;
        } else if (cplx_idx < 0 || lam.imag() > 0) {
            cplx_idx = i;
        }
    }
    if (real_idx < 0 || cplx_idx < 0 || es.eigenvalues()[real_idx].real() <= 1.0) {
        throw InvalidModelParameters("inoue_sm: M must have one real eigenvalue > 1");
    }
    m.alpha = es.eigenvalues()[real_idx].real();
    m.sm_beta = es.eigenvalues()[cplx_idx];
    Eigen::Vector3d a = es.eigenvectors().col(real_idx).real();
    normalize_real(a);
    m.sm_a = a;
    Eigen::Vector3cd b = es.eigenvectors().col(cplx_idx);
    normalize_complex(b);
    m.sm_b = b;
    return m;
}

SurfaceModel inoue_sm_default() {
    Eigen::Matrix3d M;
    M << 0, 1, 0,
         0, 0, 1,
         1, 0, 1;
    return inoue_sm_model(M);
}

namespace {

/// Shared construction of the S+ / S- derived data.  sign = +1 solves
/// c = c N^t + e + kappa (p,q); sign = -1 solves -c = c N^t + e + kappa (p,q).
void inoue_pm_derive(SurfaceModel& m, double sign) {
    const Eigen::Matrix2d& N = m.in_N;
    Eigen::EigenSolver<Eigen::Matrix2d> es(N);
    int ia = -1, ib = -1;
    for (int i = 0; i < 2; ++i) {
        if (std::abs(es.eigenvalues()[i].imag()) > 1e-10) {
            throw InvalidModelParameters("inoue s+/s-: N must have real eigenvalues");
        }
        if (es.eigenvalues()[i].real() > 1.0) ia = i; else ib = i;
    }
    if (ia < 0 || ib < 0) {
        throw InvalidModelParameters("inoue s+/s-: N must have an eigenvalue > 1");
    }
    m.alpha = es.eigenvalues()[ia].real();
    Eigen::Vector2d a = es.eigenvectors().col(ia).real();
    Eigen::Vector2d b = es.eigenvectors().col(ib).real();
    normalize_real(a);
    normalize_real(b);
    m.in_a = a;
    m.in_b = b;
    if (m.in_r == 0) throw InvalidModelParameters("inoue s+/s-: r must be nonzero");
    m.in_kappa = (b[0] * a[1] - b[1] * a[0]) / m.in_r;

    Eigen::Vector2d e;
    for (int i = 0; i < 2; ++i) {
        const double n1 = N(i, 0), n2 = N(i, 1);
        e[i] = 0.5 * n1 * (n1 - 1.0) * a[0] * b[0] + 0.5 * n2 * (n2 - 1.0) * a[1] * b[1] +
               n1 * n2 * b[0] * a[1];
    }
    Eigen::Vector2d rhs = e + m.in_r * m.in_kappa * Eigen::Vector2d(m.in_p, m.in_q);
    // Row-vector equation sign*c = c N^t + rhs transposes to (sign*I - N) c = rhs.
    Eigen::Matrix2d lhs = sign * Eigen::Matrix2d::Identity() - N;
    m.in_c = lhs.colPivHouseholderQr().solve(rhs);
    m.in_m = m.in_t.imag() / std::log(m.alpha);
}

}  // namespace

SurfaceModel inoue_splus_model(const Eigen::Matrix2d& N, int p, int q, int r, cd t) {
    if (std::abs(N.determinant() - 1.0) > 1e-9) {
        throw InvalidModelParameters("inoue_splus: N must have determinant 1");
    }
    SurfaceModel m;
    m.family = Family::InoueSPlus;
    m.n = 2;
    m.chart = Chart::HalfPlaneC;
    m.in_N = N;
    m.in_p = p;
    m.in_q = q;
    m.in_r = r;
    m.in_t = t;
    inoue_pm_derive(m, +1.0);
    return m;
}

SurfaceModel inoue_splus_default(double mm) {
    Eigen::Matrix2d N;
    N << 2, 1,
         1, 1;
    const double alpha = (3.0 + std::sqrt(5.0)) / 2.0;
    const cd t = mm == 0.0 ? cd(0.0, 0.0) : cd(0.0, mm * std::log(alpha));
    return inoue_splus_model(N, 0, 0, 1, t);
}

SurfaceModel inoue_sminus_model(const Eigen::Matrix2d& N, int p, int q, int r) {
    if (std::abs(N.determinant() + 1.0) > 1e-9) {
        throw InvalidModelParameters("inoue_sminus: N must have determinant -1");
    }
    SurfaceModel m;
    m.family = Family::InoueSMinus;
    m.n = 2;
    m.chart = Chart::HalfPlaneC;
    m.in_N = N;
    m.in_p = p;
    m.in_q = q;
    m.in_r = r;
    m.in_t = cd(0.0, 0.0);
    inoue_pm_derive(m, -1.0);
    return m;
}

SurfaceModel inoue_sminus_default() {
    Eigen::Matrix2d N;
    N << 2, -1,
         1, -1;
    return inoue_sminus_model(N, 0, 0, 1);
}

SurfaceModel sminus_double_cover(const SurfaceModel& sminus) {
    if (sminus.family != Family::InoueSMinus) {
        throw FamilyMismatch("sminus_double_cover: model is not an S- surface");
    }
    return inoue_splus_model(sminus.in_N * sminus.in_N, 0, 0, sminus.in_r, cd(0.0, 0.0));
}

SurfaceModel elliptic_model(const std::vector<Eigen::Matrix2d>& gens, cd alpha,
                            const std::vector<cd>& chi) {
    if (gens.size() != chi.size()) {
        throw InvalidModelParameters("elliptic: need one character value per generator");
    }
    if (std::abs(std::abs(alpha) - 1.0) < 1e-10) {
        throw InvalidModelParameters("elliptic: |alpha| must differ from 1");
    }
    for (const auto& g : gens) {
        if (std::abs(g.determinant() - 1.0) > 1e-9) {
            throw InvalidModelParameters("elliptic: generators must lie in SL(2,R)");
        }
    }
    SurfaceModel m;
    m.family = Family::EllipticBundle;
    m.n = 2;
    m.chart = Chart::HalfPlaneCStar;
    m.ell_gens = gens;
    m.ell_alpha = alpha;
    m.ell_chi = chi;
    m.alpha = std::abs(alpha) > 1.0 ? std::abs(alpha) : 1.0 / std::abs(alpha);
    return m;
}

SurfaceModel elliptic_default() {
    // Side-pairing generators of the regular hyperbolic octagon (genus 2):
    // rotations about i of the translation T along the imaginary axis with
    // trace 2 + 2 sqrt(2).
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix2d T;
    T << 1.0 + s2, std::sqrt(2.0 + 2.0 * s2),
         std::sqrt(2.0 + 2.0 * s2), 1.0 + s2;
    std::vector<Eigen::Matrix2d> gens;
    for (int k = 0; k < 4; ++k) {
        const double th = 0.5 * k * M_PI / 4.0;
        Eigen::Matrix2d R;
        R << std::cos(th), std::sin(th),
             -std::sin(th), std::cos(th);
        gens.push_back(R * T * R.transpose());
    }
    return elliptic_model(gens, cd(2.0, 0.0), std::vector<cd>(4, cd(1.0, 0.0)));
}

SurfaceModel torus_model(const Eigen::Matrix4d& lattice) {
    if (std::abs(lattice.determinant()) < 1e-12) {
        throw InvalidModelParameters("torus: lattice basis must be nondegenerate");
    }
    SurfaceModel m;
    m.family = Family::Torus;
    m.n = 2;
    m.chart = Chart::TorusCell;
    m.torus_lattice = lattice;
    m.alpha = 1.0;
    return m;
}

SurfaceModel torus_default() {
    return torus_model(Eigen::Matrix4d::Identity());
}

std::vector<GeneratorMap> SurfaceModel::identifications() const {
    std::vector<GeneratorMap> gens;
    switch (family) {
        case Family::Hopf: {
            std::vector<cd> al = hopf_alpha;
            gens.push_back({"f0",
                            [al](const std::vector<cd>& z) {
                                std::vector<cd> out(z.size());
                                for (size_t i = 0; i < z.size(); ++i) out[i] = al[i] * z[i];
                                return out;
                            },
                            [al](const std::vector<cd>&) {
                                Eigen::MatrixXcd j =
                                    Eigen::MatrixXcd::Zero(al.size(), al.size());
                                for (size_t i = 0; i < al.size(); ++i) j(i, i) = al[i];
                                return j;
                            }});
            break;
        }
        case Family::InoueSM: {
            const double al = alpha;
            const cd be = sm_beta;
            gens.push_back({"f0",
                            [al, be](const std::vector<cd>& z) {
                                return std::vector<cd>{al * z[0], be * z[1]};
                            },
                            [al, be](const std::vector<cd>&) { return diag2(al, be); }});
            for (int j = 0; j < 3; ++j) {
                const double aj = sm_a[j];
                const cd bj = sm_b[j];
                gens.push_back({"f" + std::to_string(j + 1),
                                [aj, bj](const std::vector<cd>& z) {
                                    return std::vector<cd>{z[0] + aj, z[1] + bj};
                                },
                                [](const std::vector<cd>&) {
                                    return Eigen::MatrixXcd::Identity(2, 2).eval();
                                }});
            }
            break;
        }
        case Family::InoueSPlus:
        case Family::InoueSMinus: {
            const double al = alpha;
            const cd tt = in_t;
            const bool minus = family == Family::InoueSMinus;
            gens.push_back({"f0",
                            [al, tt, minus](const std::vector<cd>& z) {
                                return std::vector<cd>{al * z[0],
                                                       minus ? -z[1] : z[1] + tt};
                            },
                            [al, minus](const std::vector<cd>&) {
                                return diag2(al, minus ? -1.0 : 1.0);
                            }});
            for (int j = 0; j < 2; ++j) {
                const double aj = in_a[j], bj = in_b[j], cj = in_c[j];
                gens.push_back({"f" + std::to_string(j + 1),
                                [aj, bj, cj](const std::vector<cd>& z) {
                                    return std::vector<cd>{z[0] + aj,
                                                           z[1] + bj * z[0] + cj};
                                },
                                [bj](const std::vector<cd>&) {
                                    Eigen::MatrixXcd j2 = Eigen::MatrixXcd::Identity(2, 2);
                                    j2(1, 0) = bj;
                                    return j2;
                                }});
            }
            const double kap = in_kappa;
            gens.push_back({"f3",
                            [kap](const std::vector<cd>& z) {
                                return std::vector<cd>{z[0], z[1] + kap};
                            },
                            [](const std::vector<cd>&) {
                                return Eigen::MatrixXcd::Identity(2, 2).eval();
                            }});
            break;
        }
        case Family::EllipticBundle: {
            for (size_t k = 0; k < ell_gens.size(); ++k) {
                const Eigen::Matrix2d A = ell_gens[k];
                const cd chi = ell_chi[k];
                gens.push_back(
                    {"g" + std::to_string(k),
                     [A, chi](const std::vector<cd>& z) {
                         const cd den = A(1, 0) * z[0] + A(1, 1);
                         return std::vector<cd>{(A(0, 0) * z[0] + A(0, 1)) / den,
                                                den * z[1] * chi};
                     },
                     [A, chi](const std::vector<cd>& z) {
                         const cd den = A(1, 0) * z[0] + A(1, 1);
                         Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(2, 2);
                         j(0, 0) = 1.0 / (den * den);
                         j(1, 0) = A(1, 0) * z[1] * chi;
                         j(1, 1) = den * chi;
                         return j;
                     }});
            }
            const cd al = ell_alpha;
            gens.push_back({"deck",
                            [al](const std::vector<cd>& z) {
                                return std::vector<cd>{z[0], al * z[1]};
                            },
                            [al](const std::vector<cd>&) { return diag2(1.0, al); }});
            break;
        }
        case Family::Torus: {
            for (int k = 0; k < 4; ++k) {
                const Eigen::Vector4d v = torus_lattice.col(k);
                gens.push_back({"t" + std::to_string(k),
                                [v](const std::vector<cd>& z) {
                                    return std::vector<cd>{z[0] + cd(v[0], v[1]),
                                                           z[1] + cd(v[2], v[3])};
                                },
                                [](const std::vector<cd>&) {
                                    return Eigen::MatrixXcd::Identity(2, 2).eval();
                                }});
            }
            break;
        }
    }
    return gens;
}

double SurfaceModel::invariant_defect() const {
    double defect = 0.0;
    switch (family) {
        case Family::Hopf: {
            for (const cd& a : hopf_alpha) {
                defect = std::max(defect, std::abs(std::abs(a) - std::abs(hopf_alpha[0])));
            }
            break;
        }
        case Family::InoueSM: {
            defect = std::max(defect, (sm_M * sm_a - alpha * sm_a).cwiseAbs().maxCoeff());
            defect = std::max(defect, (sm_M.cast<cd>() * sm_b - sm_beta * sm_b)
                                          .cwiseAbs()
                                          .maxCoeff());
            defect = std::max(defect, std::abs(alpha * std::norm(sm_beta) - 1.0));
            break;
        }
        case Family::InoueSPlus:
        case Family::InoueSMinus: {
            const double sign = family == Family::InoueSPlus ? 1.0 : -1.0;
            defect = std::max(defect, (in_N * in_a - alpha * in_a).cwiseAbs().maxCoeff());
            defect = std::max(defect,
                              (in_N * in_b - sign / alpha * in_b).cwiseAbs().maxCoeff());
            Eigen::Vector2d e;
            for (int i = 0; i < 2; ++i) {
                const double n1 = in_N(i, 0), n2 = in_N(i, 1);
                e[i] = 0.5 * n1 * (n1 - 1.0) * in_a[0] * in_b[0] +
                       0.5 * n2 * (n2 - 1.0) * in_a[1] * in_b[1] + n1 * n2 * in_b[0] * in_a[1];
            }
            const Eigen::Vector2d res = sign * in_c - in_N * in_c - e -
                                        in_r * in_kappa * Eigen::Vector2d(in_p, in_q);
            defect = std::max(defect, res.cwiseAbs().maxCoeff());
            break;
        }
        case Family::EllipticBundle: {
            for (const auto& g : ell_gens) {
                defect = std::max(defect, std::abs(g.determinant() - 1.0));
            }
            break;
        }
        case Family::Torus:
            break;
    }
    return defect;
}

double max_existence_time(const SurfaceModel& model) {
    if (model.family == Family::Hopf) return 1.0 / model.n;
    return std::numeric_limits<double>::infinity();
}

AnsatzState initial_ansatz(const SurfaceModel& model) {
    switch (model.family) {
        case Family::Hopf: return {{1.0, 0.0}, 0.0};
        case Family::InoueSM: return {{1.0, 1.0}, 0.0};
        case Family::InoueSPlus:
        case Family::InoueSMinus: return {{1.0}, 0.0};
        case Family::EllipticBundle: return {{2.0}, 0.0};
        case Family::Torus: return {{}, 0.0};
    }
    return {};
}

AnsatzState ansatz_at_time(const SurfaceModel& model, double t) {
    if (t < 0.0 || t >= max_existence_time(model)) {
        throw TimeOutOfRange("ansatz_at_time: t outside [0, T)");
    }
    switch (model.family) {
        case Family::Hopf: return {{1.0 - model.n * t, model.n * t}, t};
        case Family::InoueSM: return {{1.0 + t / 4.0, 1.0}, t};
        case Family::InoueSPlus:
        case Family::InoueSMinus: return {{1.0 + t / 2.0}, t};
        case Family::EllipticBundle: return {{2.0 + t / 2.0}, t};
        case Family::Torus: return {{}, t};
    }
    return {};
}

bool ansatz_positive(const SurfaceModel& model, const AnsatzState& s) {
    switch (model.family) {
        case Family::Hopf: return s.coeffs[0] > 0.0 && s.coeffs[0] + s.coeffs[1] > 0.0;
        case Family::InoueSM: return s.coeffs[0] > 0.0 && s.coeffs[1] > 0.0;
        case Family::InoueSPlus:
        case Family::InoueSMinus: return s.coeffs[0] > 0.0;
        case Family::EllipticBundle: return s.coeffs[0] > 1.0;
        case Family::Torus: return true;
    }
    return false;
}

std::vector<double> ansatz_ricci(const SurfaceModel& model, const AnsatzState& s) {
    if (!ansatz_positive(model, s)) {
        throw AnsatzNotPositive("ansatz_ricci: state is not a positive metric");
    }
    switch (model.family) {
        case Family::Hopf: return {-static_cast<double>(model.n),
                                   static_cast<double>(model.n)};
        case Family::InoueSM: return {0.25, 0.0};
        case Family::InoueSPlus:
        case Family::InoueSMinus: return {0.5};
        case Family::EllipticBundle: return {0.5};
        case Family::Torus: return {};
    }
    return {};
}

HermitianForm ansatz_metric(const SurfaceModel& model, const AnsatzState& s,
                            const ComplexPoint& p) {
    switch (model.family) {
        case Family::Hopf: {
            const double a = s.coeffs[0], b = s.coeffs[1];
            double r2 = 0.0;
            for (const cd& z : p.coords) r2 += std::norm(z);
            Eigen::MatrixXcd g(model.n, model.n);
            for (int i = 0; i < model.n; ++i) {
                for (int j = 0; j < model.n; ++j) {
                    cd v = b * std::conj(p.coords[i]) * p.coords[j] / r2;
                    if (i == j) v += a;
                    g(i, j) = v / r2;
                }
            }
            return HermitianForm{std::move(g)};
        }
        case Family::InoueSM: {
            const double y = p.coords[0].imag();
            Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
            g(0, 0) = s.coeffs[0] / (y * y);
            g(1, 1) = s.coeffs[1] * y;
            return HermitianForm{std::move(g)};
        }
        case Family::InoueSPlus:
        case Family::InoueSMinus: {
            const double y = p.coords[0].imag();
            const double v = p.coords[1].imag();
            const double V = v - model.in_m * std::log(y);
            Eigen::MatrixXcd g(2, 2);
            g(0, 0) = (s.coeffs[0] + V * V) / (y * y);
            g(0, 1) = -V / y;
            g(1, 0) = -V / y;
            g(1, 1) = 1.0;
            return HermitianForm{std::move(g)};
        }
        case Family::EllipticBundle: {
            const double y = p.coords[0].imag();
            const cd w = p.coords[1];
            Eigen::MatrixXcd g(2, 2);
            g(0, 0) = s.coeffs[0] / (y * y);
            g(0, 1) = -2.0 * kI / (y * std::conj(w));
            g(1, 0) = 2.0 * kI / (y * w);
            g(1, 1) = 4.0 / std::norm(w);
            return HermitianForm{std::move(g)};
        }
        case Family::Torus: {
            return HermitianForm{Eigen::MatrixXcd::Identity(2, 2)};
        }
    }
    return {};
}

MetricField initial_metric(const SurfaceModel& model) {
    auto mp = std::make_shared<SurfaceModel>(model);
    const AnsatzState s0 = initial_ansatz(model);
    MetricField f;
    f.model = mp;
    f.t_begin = 0.0;
    f.t_end = std::numeric_limits<double>::infinity();
    f.eval = [mp, s0](const ComplexPoint& p, double) {
        return ansatz_metric(*mp, s0, p);
    };
    return f;
}

MetricField closed_form_metric(const SurfaceModel& model) {
    auto mp = std::make_shared<SurfaceModel>(model);
    MetricField f;
    f.model = mp;
    f.t_begin = 0.0;
    f.t_end = max_existence_time(model);
    f.eval = [mp](const ComplexPoint& p, double t) {
        return ansatz_metric(*mp, ansatz_at_time(*mp, t), p);
    };
    return f;
}

LimitForm limit_form(const SurfaceModel& model) {
    LimitForm lf;
    switch (model.family) {
        case Family::Hopf: {
            lf.tag = LimitForm::Tag::FixedTime;
            const int n = model.n;
            lf.eval = [n](const ComplexPoint& p) {
                double r2 = 0.0;
                for (const cd& z : p.coords) r2 += std::norm(z);
                Eigen::MatrixXcd g(n, n);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        g(i, j) = std::conj(p.coords[i]) * p.coords[j] / (r2 * r2);
                    }
                }
                return HermitianForm{std::move(g)};
            };
            break;
        }
        case Family::InoueSM: {
            lf.tag = LimitForm::Tag::NormalizedOverT;
            lf.eval = [](const ComplexPoint& p) {
                const double y = p.coords[0].imag();
                Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
                g(0, 0) = 1.0 / (4.0 * y * y);
                return HermitianForm{std::move(g)};
            };
            break;
        }
        case Family::InoueSPlus:
        case Family::InoueSMinus:
        case Family::EllipticBundle: {
            lf.tag = LimitForm::Tag::NormalizedOverT;
            lf.eval = [](const ComplexPoint& p) {
                const double y = p.coords[0].imag();
                Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
                g(0, 0) = 1.0 / (2.0 * y * y);
                return HermitianForm{std::move(g)};
            };
            break;
        }
        case Family::Torus: {
            lf.tag = LimitForm::Tag::FixedTime;
            lf.eval = [](const ComplexPoint&) {
                return HermitianForm{Eigen::MatrixXcd::Identity(2, 2)};
            };
            break;
        }
    }
    return lf;
}

HermitianForm closed_form_ricci(const SurfaceModel& model, const ComplexPoint& p) {
    const AnsatzState s0 = initial_ansatz(model);
    if (s0.coeffs.empty()) {
        return HermitianForm{Eigen::MatrixXcd::Zero(model.n, model.n)};
    }
    const std::vector<double> vel = ansatz_ricci(model, s0);
    AnsatzState s1 = s0;
    for (size_t i = 0; i < vel.size(); ++i) s1.coeffs[i] += vel[i];
    const HermitianForm g0 = ansatz_metric(model, s0, p);
    const HermitianForm g1 = ansatz_metric(model, s1, p);
    return HermitianForm{(-(g1.g - g0.g)).eval()};
}

MetricField pullback_field(const MetricField& field,
                           std::function<std::vector<cd>(const std::vector<cd>&)> map,
                           std::function<Eigen::MatrixXcd(const std::vector<cd>&)> jac) {
    MetricField out = field;
    auto inner = field.eval;
    out.eval = [inner, map, jac](const ComplexPoint& p, double t) {
        ComplexPoint q;
        q.coords = map(p.coords);
        q.chart = p.chart;
        const HermitianForm g = inner(q, t);
        const Eigen::MatrixXcd j = jac(p.coords);
        HermitianForm res{(j.transpose() * g.g * j.conjugate()).eval()};
        res.symmetrize();
        return res;
    };
    return out;
}

namespace {

nlohmann::json cvec_to_json(const std::vector<cd>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const cd& z : v) arr.push_back({z.real(), z.imag()});
    return arr;
}

std::vector<cd> cvec_from_json(const nlohmann::json& j) {
    std::vector<cd> v;
    for (const auto& e : j) v.emplace_back(e[0].get<double>(), e[1].get<double>());
    return v;
}

template <typename Mat>
nlohmann::json mat_to_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

template <typename Mat>
void mat_from_json(const nlohmann::json& j, Mat& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int k = 0; k < m.cols(); ++k) m(i, k) = j[i][k].get<double>();
    }
}

}  // namespace

void to_json(nlohmann::json& j, const SurfaceModel& m) {
    j = nlohmann::json{{"family", family_name(m.family)}, {"n", m.n}};
    nlohmann::json derived;
    derived["alpha"] = m.alpha;
    switch (m.family) {
        case Family::Hopf:
            j["alphas"] = cvec_to_json(m.hopf_alpha);
            break;
        case Family::InoueSM:
            j["M"] = mat_to_json(m.sm_M);
            derived["a"] = {m.sm_a[0], m.sm_a[1], m.sm_a[2]};
            derived["b"] = cvec_to_json({m.sm_b[0], m.sm_b[1], m.sm_b[2]});
            derived["beta"] = {m.sm_beta.real(), m.sm_beta.imag()};
            break;
        case Family::InoueSPlus:
        case Family::InoueSMinus:
            j["N"] = mat_to_json(m.in_N);
            j["p"] = m.in_p;
            j["q"] = m.in_q;
            j["r"] = m.in_r;
            j["t"] = {m.in_t.real(), m.in_t.imag()};
            derived["a"] = {m.in_a[0], m.in_a[1]};
            derived["b"] = {m.in_b[0], m.in_b[1]};
            derived["c"] = {m.in_c[0], m.in_c[1]};
            derived["m"] = m.in_m;
            derived["kappa"] = m.in_kappa;
            break;
        case Family::EllipticBundle: {
            nlohmann::json gens = nlohmann::json::array();
            for (const auto& g : m.ell_gens) gens.push_back(mat_to_json(g));
            j["generators"] = gens;
            j["alpha"] = {m.ell_alpha.real(), m.ell_alpha.imag()};
            j["chi"] = cvec_to_json(m.ell_chi);
            break;
        }
        case Family::Torus:
            j["lattice"] = mat_to_json(m.torus_lattice);
            break;
    }
    j["derived"] = derived;
}

void from_json(const nlohmann::json& j, SurfaceModel& m) {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "hopf") {
        m = hopf_model(j.at("n").get<int>(), cvec_from_json(j.at("alphas")));
    } else if (fam == "inoue_sm") {
        Eigen::Matrix3d M;
        mat_from_json(j.at("M"), M);
        m = inoue_sm_model(M);
    } else if (fam == "inoue_splus" || fam == "inoue_sminus") {
        Eigen::Matrix2d N;
        mat_from_json(j.at("N"), N);
        const int p = j.at("p").get<int>(), q = j.at("q").get<int>(),
                  r = j.at("r").get<int>();
        if (fam == "inoue_splus") {
            const auto& tt = j.at("t");
            m = inoue_splus_model(N, p, q, r, cd(tt[0].get<double>(), tt[1].get<double>()));
        } else {
            m = inoue_sminus_model(N, p, q, r);
        }
    } else if (fam == "elliptic") {
        std::vector<Eigen::Matrix2d> gens;
        for (const auto& gj : j.at("generators")) {
            Eigen::Matrix2d g;
            mat_from_json(gj, g);
            gens.push_back(g);
        }
        const auto& aj = j.at("alpha");
        m = elliptic_model(gens, cd(aj[0].get<double>(), aj[1].get<double>()),
                           cvec_from_json(j.at("chi")));
    } else if (fam == "torus") {
        Eigen::Matrix4d L;
        mat_from_json(j.at("lattice"), L);
        m = torus_model(L);
    } else {
        throw InvalidModelParameters("from_json: unknown family " + fam);
    }
}

}  // namespace crf
