#include "crf/flow.h"

#include <cmath>

#include "crf/errors.h"
#include "crf/fd.h"

namespace crf {

namespace {

std::vector<AnsatzState> affine_states(const SurfaceModel& model, const AnsatzState& init,
                                       const std::vector<double>& vel,
                                       const std::vector<double>& times) {
    std::vector<AnsatzState> out;
    out.reserve(times.size());
    for (double t : times) {
        AnsatzState s;
        s.t = init.t + t;
        s.coeffs = init.coeffs;
        for (size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] += vel[i] * t;
        if (!ansatz_positive(model, s)) {
            throw AnsatzNotPositive("evolve_ansatz: state lost positivity");
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

FlowTrajectory evolve_ansatz(const SurfaceModel& model, double t_end, int steps) {
    if (t_end < 0.0 || t_end >= max_existence_time(model)) {
        throw TimeOutOfRange("evolve_ansatz: t_end outside [0, T)");
    }
    FlowTrajectory traj;
    traj.model = std::make_shared<SurfaceModel>(model);
    const AnsatzState init = initial_ansatz(model);
    const std::vector<double> vel = ansatz_ricci(model, init);
    for (int k = 0; k <= steps; ++k) traj.times.push_back(t_end * k / std::max(steps, 1));
    traj.states = affine_states(model, init, vel, traj.times);
    return traj;
}

FlowTrajectory evolve_ansatz_from(const SurfaceModel& model, const AnsatzState& init,
                                  double t_more, int steps) {
    FlowTrajectory traj;
    traj.model = std::make_shared<SurfaceModel>(model);
    const std::vector<double> vel = ansatz_ricci(model, init);
    std::vector<double> rel;
    for (int k = 0; k <= steps; ++k) rel.push_back(t_more * k / std::max(steps, 1));
    traj.states = affine_states(model, init, vel, rel);
    for (const AnsatzState& s : traj.states) traj.times.push_back(s.t);
    return traj;
}

ComplexPoint random_chart_point(const SurfaceModel& model, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    switch (model.family) {
        case Family::Hopf: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::vector<cd> z(model.n);
            double n2 = 0.0;
            for (int i = 0; i < model.n; ++i) {
                z[i] = cd(gauss(rng), gauss(rng));
                n2 += std::norm(z[i]);
            }
            const double r = 1.0 + uni(rng);
            for (cd& v : z) v *= r / std::sqrt(n2);
            return {z, Chart::PuncturedCn};
        }
        case Family::InoueSM:
        case Family::InoueSPlus:
        case Family::InoueSMinus: {
            const double y = 1.0 + (model.alpha - 1.0) * uni(rng);
            return {{cd(uni(rng), y), cd(uni(rng), uni(rng))}, Chart::HalfPlaneC};
        }
        case Family::EllipticBundle: {
            const double y = 0.5 + 1.5 * uni(rng);
            const double rw = 1.0 + uni(rng);
            const double ph = 2.0 * M_PI * uni(rng);
            return {{cd(2.0 * uni(rng) - 1.0, y), std::polar(rw, ph)},
                    Chart::HalfPlaneCStar};
        }
        case Family::Torus: {
            const Eigen::Vector4d s(uni(rng), uni(rng), uni(rng), uni(rng));
            const Eigen::Vector4d v = model.torus_lattice * s;
            return {{cd(v[0], v[1]), cd(v[2], v[3])}, Chart::TorusCell};
        }
    }
    return {};
}

ValidationReport validate_flow(const SurfaceModel& model, int samples, double h,
                               double dt, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double T = max_existence_time(model);
    const double t_hi = std::isfinite(T) ? T - 2.0 * dt - 1e-3 : 5.0;
    const double t_lo = 2.0 * dt;
    const MetricField field = closed_form_metric(model);
    const auto gens = model.identifications();

    ValidationReport rep;
    rep.samples = samples;
    for (int k = 0; k < samples; ++k) {
        const ComplexPoint p = random_chart_point(model, rng);
        const double t = t_lo + (t_hi - t_lo) * uni(rng);

        const HermitianForm gp = field.eval(p, t + dt);
        const HermitianForm gm = field.eval(p, t - dt);
        const HermitianForm ric = chern_ricci_fd(field, p, t, h);
        HermitianForm dev{((gp.g - gm.g) / (2.0 * dt) + ric.g).eval()};
        rep.max_flow_deviation =
            std::max(rep.max_flow_deviation, dev.g.cwiseAbs().maxCoeff());

        if (model.n == 2) {
            // The ddbar omega = 0 defect is the surface Gauduchon condition.
            rep.max_gauduchon_defect =
                std::max(rep.max_gauduchon_defect, gauduchon_defect_fd(field, p, t, h));
        }

        const HermitianForm g0 = field.eval(p, t);
        for (const GeneratorMap& gen : gens) {
            ComplexPoint q{gen.apply(p.coords), p.chart};
            const Eigen::MatrixXcd j = gen.jacobian(p.coords);
            const Eigen::MatrixXcd pulled = j.transpose() * field.eval(q, t).g * j.conjugate();
            rep.max_invariance_defect =
                std::max(rep.max_invariance_defect, (pulled - g0.g).cwiseAbs().maxCoeff());
        }
    }
    return rep;
}

}  // namespace crf
