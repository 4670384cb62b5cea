#include "crf/functionals.h"

#include <algorithm>

namespace crf {

double total_volume(const SurfaceModel& model, const SampleSet& set, double t) {
    const AnsatzState s = ansatz_at_time(model, t);
    double acc = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        acc += det_g(ansatz_metric(model, s, set.points[i])) * set.weights[i];
    }
    return 8.0 * acc;
}

double normalized_limit_distance(const SurfaceModel& model, const SampleSet& set,
                                 double t) {
    const AnsatzState s = ansatz_at_time(model, t);
    const LimitForm lf = limit_form(model);
    const double scale = lf.tag == LimitForm::Tag::NormalizedOverT ? 1.0 / t : 1.0;
    double worst = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        HermitianForm g = ansatz_metric(model, s, set.points[i]);
        g.g *= scale;
        worst = std::max(worst, sup_distance(g, lf.eval(set.points[i])));
    }
    return worst;
}

}  // namespace crf
