#pragma once

#include <random>

#include "crf/models.h"

namespace crf {

/// Recorded evolution of an invariant ansatz family (exact linear ODE states).
struct FlowTrajectory {
    std::shared_ptr<const SurfaceModel> model;
    std::vector<double> times;
    std::vector<AnsatzState> states;
};

/// Integrate the ansatz flow exactly from t = 0 to t_end with K recorded
/// steps (states are affine in t).  Throws TimeOutOfRange for
/// t_end >= max_existence_time.
FlowTrajectory evolve_ansatz(const SurfaceModel& model, double t_end, int steps);

/// Same, starting from an arbitrary positive ansatz state and advancing by
/// t_more; used for the semigroup property.  Throws AnsatzNotPositive if any
/// recorded state loses positivity.
FlowTrajectory evolve_ansatz_from(const SurfaceModel& model, const AnsatzState& init,
                                  double t_more, int steps);

/// Oracle report of the flow identity d/dt omega = -Ric on random samples.
struct ValidationReport {
    double max_flow_deviation = 0.0;       ///< sup |d_t g + Ric_fd| over samples
    double max_gauduchon_defect = 0.0;     ///< sup Gauduchon defect of omega(t)
    double max_invariance_defect = 0.0;    ///< sup |g - gamma^* g| over generators
    int samples = 0;
};

/// Draw a random point of the model's chart, inside the region the samplers
/// cover (shared by validation and tests).
ComplexPoint random_chart_point(const SurfaceModel& model, std::mt19937_64& rng);

ValidationReport validate_flow(const SurfaceModel& model, int samples, double h,
                               double dt, unsigned long long seed = 7ULL);

}  // namespace crf
