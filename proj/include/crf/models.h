#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "crf/hermitian.h"

namespace crf {

enum class Family { Hopf, InoueSM, InoueSPlus, InoueSMinus, EllipticBundle, Torus };

std::string family_name(Family f);

/// One group identification gamma of the universal cover, with its holomorphic
/// Jacobian (used to check metric invariance: g(p) = J^H g(gamma p) J).
struct GeneratorMap {
    std::string name;
    std::function<std::vector<cd>(const std::vector<cd>&)> apply;
    std::function<Eigen::MatrixXcd(const std::vector<cd>&)> jacobian;
};

/// Descriptor of one model family instance.  Parameters not belonging to the
/// family are left at defaults.  Derived eigendata is computed at construction
/// and re-checked by the invariants() method.
struct SurfaceModel {
    Family family = Family::Torus;
    int n = 2;  ///< complex dimension (2 except for general Hopf manifolds)
    Chart chart = Chart::TorusCell;

    // Hopf
    std::vector<cd> hopf_alpha;  ///< contraction factors, |alpha_1|=...=|alpha_n| != 1

    // Inoue S_M
    Eigen::Matrix3d sm_M;
    Eigen::Vector3d sm_a;   ///< real eigenvector for alpha  (derived)
    Eigen::Vector3cd sm_b;  ///< eigenvector for beta         (derived)
    cd sm_beta;             ///< complex eigenvalue           (derived)

    // Inoue S+ / S-
    Eigen::Matrix2d in_N;
    int in_p = 0, in_q = 0, in_r = 1;
    cd in_t;                 ///< the parameter t of S+ (0 for S-)
    double in_m = 0.0;       ///< Im t / log alpha              (derived)
    Eigen::Vector2d in_a;    ///< eigenvector for alpha         (derived)
    Eigen::Vector2d in_b;    ///< eigenvector for 1/alpha (S+) or -1/alpha (S-) (derived)
    Eigen::Vector2d in_c;    ///< solution of the c-equation    (derived)
    double in_kappa = 0.0;   ///< (b1 a2 - b2 a1)/r             (derived)

    // Elliptic bundle
    std::vector<Eigen::Matrix2d> ell_gens;  ///< Fuchsian generators in SL(2,R)
    cd ell_alpha;                           ///< deck factor on C*, |alpha| != 1
    std::vector<cd> ell_chi;                ///< character values on the generators

    // Torus
    Eigen::Matrix4d torus_lattice = Eigen::Matrix4d::Identity();  ///< columns: basis of R^4

    /// alpha > 1 of the Hopf / Inoue / elliptic construction (|alpha_1| for Hopf,
    /// |alpha| for elliptic).
    double alpha = 1.0;

    std::vector<GeneratorMap> identifications() const;

    /// Max violation of the construction's eigen-relations and the c-equation.
    double invariant_defect() const;
};

SurfaceModel hopf_model(int n, const std::vector<cd>& alphas);
SurfaceModel hopf_default(int n = 2);
SurfaceModel inoue_sm_model(const Eigen::Matrix3d& M);
SurfaceModel inoue_sm_default();
SurfaceModel inoue_splus_model(const Eigen::Matrix2d& N, int p, int q, int r, cd t);
SurfaceModel inoue_splus_default(double m = 0.0);
SurfaceModel inoue_sminus_model(const Eigen::Matrix2d& N, int p, int q, int r);
SurfaceModel inoue_sminus_default();
/// The S+ surface of N^2 that double-covers an S- surface.
SurfaceModel sminus_double_cover(const SurfaceModel& sminus);
SurfaceModel elliptic_model(const std::vector<Eigen::Matrix2d>& gens, cd alpha,
                            const std::vector<cd>& chi);
SurfaceModel elliptic_default();
SurfaceModel torus_model(const Eigen::Matrix4d& lattice);
SurfaceModel torus_default();

void to_json(nlohmann::json& j, const SurfaceModel& m);
void from_json(const nlohmann::json& j, SurfaceModel& m);

/// A chart domain plus a time-parameterized pointwise metric evaluator.
struct MetricField {
    std::shared_ptr<const SurfaceModel> model;
    std::function<HermitianForm(const ComplexPoint&, double)> eval;
    double t_begin = 0.0;
    double t_end = 0.0;  ///< half-open [t_begin, t_end)
};

/// The finite coefficient vector of an invariant metric family at a time.
/// Hopf: (a, b) in (1/r^2)(a delta + b zbar z / r^2); S_M: (a, b) in
/// a (1/y^2) dz slot + b y dw slot; S+/S-/elliptic: single dz-slot coefficient.
struct AnsatzState {
    std::vector<double> coeffs;
    double t = 0.0;
};

double max_existence_time(const SurfaceModel& model);

/// Ansatz coefficients at t = 0.
AnsatzState initial_ansatz(const SurfaceModel& model);

/// Exact coefficients of the closed-form solution at time t (affine in t).
AnsatzState ansatz_at_time(const SurfaceModel& model, double t);

/// Coefficient velocity -Ric in the ansatz basis; constant for every family.
/// Throws AnsatzNotPositive if the state does not reconstruct a positive metric.
std::vector<double> ansatz_ricci(const SurfaceModel& model, const AnsatzState& s);

/// Pointwise metric of an ansatz state (evaluator ignores its time argument).
HermitianForm ansatz_metric(const SurfaceModel& model, const AnsatzState& s,
                            const ComplexPoint& p);

/// True if the state's metric is positive on the whole fundamental domain
/// (family-specific algebraic conditions).
bool ansatz_positive(const SurfaceModel& model, const AnsatzState& s);

/// The initial metric omega_0 as a field (eval at any t returns omega_0).
MetricField initial_metric(const SurfaceModel& model);

/// The closed-form flow solution omega(t); eval throws TimeOutOfRange outside
/// [0, max_existence_time).
MetricField closed_form_metric(const SurfaceModel& model);

/// Degenerate limit of the flow and how it is approached.
struct LimitForm {
    enum class Tag { FixedTime, NormalizedOverT };
    Tag tag = Tag::FixedTime;
    std::function<HermitianForm(const ComplexPoint&)> eval;
};

LimitForm limit_form(const SurfaceModel& model);

/// Exact Chern-Ricci form of the family metrics (time-independent): the
/// coefficient-velocity image -(d/dt) ansatz_metric, computed from the affine
/// dependence of the metric on the ansatz coefficients.
HermitianForm closed_form_ricci(const SurfaceModel& model, const ComplexPoint& p);

/// Pullback of a field under a holomorphic chart map (used for the conjugation
/// covariance property): (f^*g)(p) = J(p)^H g(f(p)) J(p).
MetricField pullback_field(const MetricField& field,
                           std::function<std::vector<cd>(const std::vector<cd>&)> map,
                           std::function<Eigen::MatrixXcd(const std::vector<cd>&)> jac);

}  // namespace crf
