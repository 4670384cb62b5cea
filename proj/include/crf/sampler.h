#pragma once

#include "crf/models.h"

namespace crf {

/// Candidate graph edge between sample a and sample b.  For edges that cross a
/// group identification, b_chart holds the coordinates of the image gamma(b)
/// adjacent to a in a's chart neighborhood; for interior edges b_chart equals
/// the coordinates of b.  glued marks identification edges (always kept by
/// graph builders regardless of neighbor pruning).
struct SampleEdge {
    int a = 0;
    int b = 0;
    std::vector<cd> b_chart;
    bool glued = false;
};

/// A quasi-uniform sample of a fundamental domain with its gluing structure.
/// layer indexes the position along the collapsing circle direction, cell the
/// transverse fiber cell, circle_coord in [0,1) the continuous circle position.
/// involution is nonempty only for the S- double cover (index permutation of
/// the covering involution).
struct SampleSet {
    Chart chart = Chart::HalfPlaneC;
    std::vector<ComplexPoint> points;
    std::vector<double> weights;
    std::vector<int> layer;
    std::vector<int> cell;
    std::vector<double> circle_coord;
    std::vector<SampleEdge> edges;
    std::vector<int> involution;

    int size() const { return static_cast<int>(points.size()); }
};

/// Density knobs for the per-family samplers; fields not used by a family are
/// ignored.  seed fixes the pseudo-random direction sets.
struct SamplerParams {
    int shells = 16;       ///< radial shells (Hopf) / w shells (elliptic)
    int directions = 500;  ///< sphere directions (Hopf)
    int layers = 8;        ///< y layers (Inoue families)
    int grid = 12;         ///< transverse grid per axis (Inoue T^3 / torus cell)
    int base_points = 220; ///< hyperbolic base samples (elliptic)
    int w_phases = 10;     ///< w phase samples (elliptic)
    int knn = 12;          ///< same-layer nearest-neighbor candidates
    double base_radius = 1.4;  ///< hyperbolic sampling radius about i (elliptic)
    unsigned long long seed = 20260823ULL;
};

/// Sample the fundamental domain of a model with identification edges.  For
/// S- models this samples the S+ double cover adapted to the covering
/// involution and fills SampleSet::involution.  Throws BudgetExceeded above
/// 2e6 points.
SampleSet sample_fundamental_domain(const SurfaceModel& model, const SamplerParams& par);

}  // namespace crf
