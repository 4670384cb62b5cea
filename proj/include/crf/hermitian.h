#pragma once

#include <complex>
#include <Eigen/Dense>

namespace crf {

using cd = std::complex<double>;

/// Chart of the ambient complex manifold a point lives in.
enum class Chart {
    PuncturedCn,    ///< C^n minus the origin (Hopf)
    HalfPlaneC,     ///< H x C, Im z > 0 (Inoue families)
    HalfPlaneCStar, ///< H x C*, Im z > 0 and w != 0 (elliptic bundles)
    TorusCell,      ///< fundamental cell of a lattice in C^2
};

/// A point in chart coordinates.
struct ComplexPoint {
    std::vector<cd> coords;
    Chart chart = Chart::HalfPlaneC;

    int dim() const { return static_cast<int>(coords.size()); }
};

/// True if coords lie strictly inside the declared chart domain.
bool chart_contains(Chart chart, const std::vector<cd>& coords);

/// Coefficient matrix g_{ij-bar} of a real (1,1)-form sqrt(-1) g_{ij-bar} dz_i dz_j-bar.
/// Hermitian symmetry is an invariant (enforced to 1e-12 by symmetrize());
/// positive-definiteness is a queryable property, not an invariant.
struct HermitianForm {
    Eigen::MatrixXcd g;

    HermitianForm() = default;
    explicit HermitianForm(Eigen::MatrixXcd m) : g(std::move(m)) {}

    int dim() const { return static_cast<int>(g.rows()); }

    /// Max abs deviation from conjugate symmetry.
    double hermitian_defect() const;

    /// Replace g by (g + g^H)/2.
    void symmetrize();
};

/// Real determinant of a Hermitian form (g is symmetrized first; the residual
/// imaginary part, at most 1e-12 in valid inputs, is discarded).
double det_g(const HermitianForm& form);

/// True if the form is positive definite (all leading principal minors > 0).
bool is_positive(const HermitianForm& form);

/// tr(g^{-1} gp). Throws SingularMetric if cond(g) > 1e12, and requires g > 0.
double trace_with(const HermitianForm& g, const HermitianForm& gp);

/// Max abs entry of the difference of two coefficient matrices.
double sup_distance(const HermitianForm& a, const HermitianForm& b);

}  // namespace crf
