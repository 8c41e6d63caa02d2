#include "deform/rest_fit.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <algorithm>
#include <string>

namespace flexmesh::deform {

double rest_objective(const JacobianField& jac, bool squared)
{
    double s = 0;
    for (const auto& m : jac.per_face) {
        const double d2 = (m - Mat2::Identity()).squaredNorm();
        s += squared ? d2 : std::sqrt(d2);
    }
    return s;
}

double mean_identity_deviation(const JacobianField& jac)
{
    if (jac.size() == 0) return 0;
    return rest_objective(jac, false) / static_cast<double>(jac.size());
}

namespace {

JacobianField descend(const JacobianField& jac, double step, bool squared)
{
    JacobianField out = jac;
    for (auto& m : out.per_face) {
        const Mat2 d = m - Mat2::Identity();
        if (squared) {
            // gradient 2(J - I); clamp so a step never overshoots I
            m -= std::min(2.0 * step, 1.0) * d;
        } else {
            const double n = d.norm();
            if (n > 0) m -= (std::min(step, n) / n) * d;
        }
    }
    return out;
}

} // namespace

RestFitResult fit_rest_jacobians(const FactorizedSystem& sys, const RestFitOptions& options)
{
    require(options.iterations >= 1, ErrorCode::InvalidArgument, "iterations must be >= 1");
    require(options.step_size > 0, ErrorCode::InvalidArgument, "step size must be positive");

    const auto& ops = sys.operators();
    const std::size_t nf = static_cast<std::size_t>(ops.face_count());
    const KeypointConstraint rest{sys.mesh().keypoint_positions(), sys.weight()};

    JacobianField jac = JacobianField::identity(nf);
    if (options.init_noise > 0) {
        Rng rng = Rng(options.seed).split("rest-fit-init");
        for (auto& m : jac.per_face)
            for (int i = 0; i < 4; ++i) m(i / 2, i % 2) += options.init_noise * rng.normal();
    }

    RestFitResult result;
    double current = rest_objective(jac, options.squared);
    result.history.push_back(current);

    double step = options.step_size;
    int rejected = 0;
    for (int it = 0; it < options.iterations; ++it) {
        result.iterations_run = it + 1;
        if (current <= options.tolerance) break;

        JacobianField trial = ops.jacobians(solve(sys, descend(jac, step, options.squared), rest));
        const double value = rest_objective(trial, options.squared);
        if (!std::isfinite(value)) fail(ErrorCode::NonFinite, "rest fit produced a non-finite objective at iteration " + std::to_string(it));

        if (value <= current) {
            jac = std::move(trial);
            current = value;
            result.history.push_back(current);
            step = options.step_size;
            rejected = 0;
        } else {
            step *= 0.5;
            if (++rejected >= options.divergence_patience)
                fail(ErrorCode::Divergence,
                     "rest fit diverged: objective increased for " + std::to_string(rejected) +
                         " consecutive steps (iteration " + std::to_string(it) + ", objective " +
                         std::to_string(current) + ")");
        }
    }

    result.mean_free_deviation = mean_identity_deviation(jac);
    result.mean_recovered_deviation = mean_identity_deviation(ops.jacobians(solve(sys, jac, rest)));
    result.jacobians = std::move(jac);
    return result;
}

} // namespace flexmesh::deform
