#pragma once

#include "crf/sampler.h"
#include "crf/torus_flow.h"

namespace crf {

/// Volume int omega(t)^2 over the sampled fundamental domain (midpoint rule
/// with the sampler's cell weights).  Throws TimeOutOfRange outside [0, T).
double total_volume(const SurfaceModel& model, const SampleSet& set, double t);

/// Sup over samples of the coefficient-matrix distance between omega(t)
/// (normalized by 1/t when the family's limit is a normalized one) and the
/// limit form.
double normalized_limit_distance(const SurfaceModel& model, const SampleSet& set,
                                 double t);

}  // namespace crf
