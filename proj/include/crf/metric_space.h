#pragma once

#include <string>

#include "crf/sampler.h"

namespace crf {

/// A finite metric space of sampled points with geodesic-graph distances.
struct SampledMetricSpace {
    std::vector<int> ids;  ///< indices into the originating SampleSet
    Eigen::MatrixXd dist;  ///< symmetric, zero diagonal
    double t = 0.0;

    int size() const { return static_cast<int>(ids.size()); }
    double diameter() const;
};

/// Build the geodesic-graph metric space of a sampled fundamental domain at
/// flow time t.  Edge lengths are 3-point quadratures of sqrt(2 Re(v^H g v))
/// along straight chart segments; identification edges use the glued image
/// coordinates.  Per node, the k_neighbors shortest candidate edges are kept
/// (glued edges always).  subset selects the points whose pairwise distances
/// are recorded (empty = all); lengths are scaled by length_scale (1/sqrt(t)
/// for normalized limits).  Throws DisconnectedGraph if a distance is
/// unreachable.
/// chord_edges adds direct subset-to-subset segments: lattice-wrap minimized
/// for the torus, fiber-lattice-word minimized for the Inoue families (these
/// capture the dense-orbit shortcuts through the collapsing fiber), and
/// Fuchsian-word glue edges for the elliptic family (quotient shortcuts
/// through the base polygon boundary).  If
/// involution is given (subset-local permutation), chord lengths are
/// min-symmetrized over it so the graph is exactly equivariant.
SampledMetricSpace build_space(const SurfaceModel& model, double t, const SampleSet& set,
                               int k_neighbors, std::vector<int> subset = {},
                               int workers = 4, double length_scale = 1.0,
                               bool chord_edges = false,
                               const std::vector<int>* involution = nullptr);

/// Finite reference space: a circle of given radius or a hyperbolic-plane
/// domain with distances minimized over a set of group elements.
struct ReferenceSpace {
    enum class Kind { Circle, Hyperbolic };
    Kind kind = Kind::Circle;
    double radius = 0.0;
    std::vector<double> circle_pts;          ///< circle coordinates in [0,1)
    std::vector<cd> hyp_pts;
    std::vector<Eigen::Matrix2d> group;      ///< words applied on the right point

    int size() const;
    double circumference() const { return 2.0 * M_PI * radius; }
    double distance(int u, int v) const;
};

/// Circle of the given radius sampled at `samples` uniform points.
ReferenceSpace circle_reference(double radius, int samples);

/// The collapsed-circle references of the Hopf and Inoue theorems
/// (radius log|alpha_1|/(sqrt(2) pi); log alpha/(2 sqrt(2) pi); log alpha/(2 pi);
/// log alpha/pi).  Throws FamilyMismatch for other families.
ReferenceSpace hopf_circle_reference(const SurfaceModel& model, int samples);
ReferenceSpace inoue_circle_reference(const SurfaceModel& model, int samples);

/// Hyperbolic upper-half-plane distance min over group words of length <= word_len
/// built from the model's Fuchsian generators.
ReferenceSpace hyperbolic_reference(const SurfaceModel& model,
                                    const std::vector<cd>& base_points, int word_len);
double hyperbolic_distance(cd z1, cd z2);

/// Maps-based GH correspondence between a space and a reference sample.
struct Correspondence {
    std::vector<int> F;  ///< per space point: reference sample index
    std::vector<int> G;  ///< per reference sample: space point index
};

/// Nearest-circle-coordinate correspondence for a circle reference.
Correspondence circle_correspondence(const SampledMetricSpace& X, const SampleSet& set,
                                     const ReferenceSpace& ref);

/// Maps-based GH epsilon: max of pair distortion and round-trip displacement
/// in both directions over all sampled pairs.
double gh_upper_bound(const SampledMetricSpace& X, const ReferenceSpace& ref,
                      const Correspondence& corr);

/// Equivariant variant: adds the compatibility of the maps with an isometric
/// involution sigma_X on the space and sigma_Y on the reference sample.
double equivariant_gh_upper_bound(const SampledMetricSpace& X, const ReferenceSpace& ref,
                                  const Correspondence& corr,
                                  const std::vector<int>& sigma_X,
                                  const std::vector<int>& sigma_Y);

/// Quotient by an isometric involution (tolerance-checked; throws
/// NotAnIsometry): representatives with min-over-orbit distances.
SampledMetricSpace equivariant_quotient(const SampledMetricSpace& X,
                                        const std::vector<int>& sigma,
                                        double tol = 1e-6);

/// Max pairwise distance within one Hopf sphere shell using only edges nearly
/// tangent to the contact distribution (angle <= max_angle_deg).
double fiber_collapse_rate(const SurfaceModel& model, double t, const SampleSet& set,
                           int shell = 0, double max_angle_deg = 15.0, int workers = 4);

/// Flat binary export: uint64 point count then row-major little-endian doubles.
void write_distance_matrix(const std::string& path, const Eigen::MatrixXd& dist);

}  // namespace crf
