#include "vac/perception.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vac/errors.hpp"

namespace vac {

void PerturbationParams::validate() const {
    if (!std::isfinite(beta_offset) || !(std::abs(beta_offset) < kMaxVergenceOffset)) {
        throw ValidationError("beta_offset", "must satisfy |beta| < " + std::to_string(kMaxVergenceOffset) +
                                                 " rad, got " + std::to_string(beta_offset));
    }
    if (accommodation_distance && !(*accommodation_distance > 0.0)) {
        throw ValidationError("accommodation_distance", "must be positive");
    }
}

double perturbed_vergence(double vergence, const PerturbationParams& params) {
    return vergence + params.beta_offset;
}

double effective_target_angle(double vergence, double disparity, const PerturbationParams& params) {
    const double tau_hat = perturbed_vergence(vergence, params) - disparity;
    if (!(tau_hat > 0.0)) {
        throw DomainError("effective target angle is not positive (" + std::to_string(tau_hat) +
                          " rad); target would be perceived at or beyond infinity");
    }
    return tau_hat;
}

double perceived_distance(const ViewingConfiguration& config, const PerturbationParams& params) {
    const double vergence = config.fixation.vergence();
    const double tau = subtended_angle(config.target, config.eyes);
    const double delta = disparity_from_vergence(vergence, tau);
    return distance_from_angle(effective_target_angle(vergence, delta, params), config.eyes);
}

double distance_error(const ViewingConfiguration& config, const PerturbationParams& params) {
    return perceived_distance(config, params) - config.target.norm();
}

double offset_as_fixation_shift(const PerturbationParams& params, double fixation_distance,
                                const EyeGeometry& eyes) {
    if (!(fixation_distance > 0.0)) {
        throw DomainError("fixation distance must be positive");
    }
    const double vergence = 2.0 * std::atan2(eyes.half_ipd(), fixation_distance);
    return fixation_distance - distance_from_angle(perturbed_vergence(vergence, params), eyes);
}

double fixation_distance_for_shift(const PerturbationParams& params, double shift,
                                   const EyeGeometry& eyes, double lo, double hi) {
    auto f = [&](double d) { return offset_as_fixation_shift(params, d, eyes) - shift; };
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo * fhi > 0.0) {
        throw ValidationError("shift", "no fixation distance in [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "] m produces the requested shift");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

EndpointPrediction predict_endpoint(double target_distance, const PerturbationParams& params,
                                    const EyeGeometry& eyes) {
    const double tau = subtended_angle({0.0, 0.0, target_distance}, eyes);
    const double endpoint = distance_from_angle(effective_target_angle(tau, 0.0, params), eyes);
    return {endpoint, endpoint - target_distance};
}

ScenePoint perceived_point(const ScenePoint& point, const EyeGeometry& eyes,
                           const PerturbationParams& params) {
    const double tau = subtended_angle(point, eyes);
    const double d_hat = distance_from_angle(effective_target_angle(tau, 0.0, params), eyes);
    const double radicand = d_hat * d_hat - point.x * point.x - point.y * point.y;
    if (!(radicand > 0.0)) {
        throw DomainError("perceived distance is shorter than the lateral offset of point (" +
                          std::to_string(point.x) + ", " + std::to_string(point.y) + ", " +
                          std::to_string(point.z) + ")");
    }
    return {point.x, point.y, std::sqrt(radicand)};
}

double disparity_difference(const ScenePoint& hand_view, const ScenePoint& target_view,
                            const EyeGeometry& eyes) {
    return subtended_angle(target_view, eyes) - subtended_angle(hand_view, eyes);
}

double predicted_reach_error(double reach_distance, const EyeGeometry& eyes,
                             const PerturbationParams& params, const RigidTransform& view_from_world) {
    const ScenePoint target_view = view_from_world.apply({0.0, 0.0, reach_distance});
    const ScenePoint perceived_world =
        view_from_world.inverse().apply(perceived_point(target_view, eyes, params));
    return perceived_world.z - reach_distance;
}

ReachErrorGradient predicted_reach_error_gradient(double reach_distance, double ipd, double beta,
                                                  const RigidTransform& view_from_world) {
    const ScenePoint p = view_from_world.apply({0.0, 0.0, reach_distance});
    if (!(p.z > 0.0) || !(ipd > 0.0)) {
        throw DomainError("target must lie in front of the eyes with positive ipd");
    }
    const double half = 0.5 * ipd;
    const double d = p.norm();
    const double a = half / d;  // tan(tau / 2)
    const double half_angle = std::atan(a) + 0.5 * beta;
    if (!(half_angle > 0.0 && half_angle < 0.5 * std::numbers::pi)) {
        throw DomainError("effective target angle outside (0, pi)");
    }
    const double t = std::tan(half_angle);
    const double d_hat = half / t;
    const double radicand = d_hat * d_hat - p.x * p.x - p.y * p.y;
    if (!(radicand > 0.0)) {
        throw DomainError("perceived distance is shorter than the lateral offset of the target");
    }
    const double z_hat = std::sqrt(radicand);

    // World depth of the perceived point: sum_k R(k, 2) * (p_hat_k - t_k).
    const auto& r = view_from_world.rotation();
    const auto& tr = view_from_world.translation();
    const double depth = r(0, 2) * (p.x - tr.x()) + r(1, 2) * (p.y - tr.y()) + r(2, 2) * (z_hat - tr.z());

    const double sec2 = 1.0 + t * t;
    const double dz_dd = d_hat / z_hat;
    const double dd_dbeta = -half / (t * t) * sec2 * 0.5;
    const double dangle_dipd = 1.0 / (1.0 + a * a) / (2.0 * d);
    const double dd_dipd = 0.5 / t - half / (t * t) * sec2 * dangle_dipd;

    // Without an offset the percept is the target itself, for every IPD.
    if (beta == 0.0) return {0.0, r(2, 2) * dz_dd * dd_dbeta, 0.0};
    return {depth - reach_distance, r(2, 2) * dz_dd * dd_dbeta, r(2, 2) * dz_dd * dd_dipd};
}

std::vector<PredictionRow> prediction_curve(std::span<const double> distances,
                                            const PerturbationParams& params, const EyeGeometry& eyes) {
    std::vector<PredictionRow> rows;
    rows.reserve(distances.size());
    for (double d : distances) rows.push_back({d, predict_endpoint(d, params, eyes).error});
    return rows;
}

}  // namespace vac
