#pragma once

// Forward model of the vergence-accommodation conflict: a constant offset on
// the vergence angle distorts the distance recovered by triangulation.

#include <optional>
#include <span>
#include <vector>

#include "vac/geometry.hpp"
#include "vac/pose.hpp"

namespace vac {

inline constexpr double kMaxVergenceOffset = 0.05;  // rad

struct PerturbationParams {
    double beta_offset = 0.0;                      // rad, added to the vergence angle
    std::optional<double> accommodation_distance;  // m, informational

    /// Throws ValidationError unless |beta_offset| < kMaxVergenceOffset.
    void validate() const;
};

struct ViewingConfiguration {
    EyeGeometry eyes;
    FixationState fixation;
    ScenePoint target;
};

double perturbed_vergence(double vergence, const PerturbationParams& params);

/// tau_hat = (phi + beta) - delta. Throws DomainError when the result is not
/// positive (target perceived at or beyond infinity).
double effective_target_angle(double vergence, double disparity, const PerturbationParams& params);

/// Perceived cyclopean distance of the configuration's target.
double perceived_distance(const ViewingConfiguration& config, const PerturbationParams& params);

/// perceived minus true cyclopean distance; negative means underestimation.
double distance_error(const ViewingConfiguration& config, const PerturbationParams& params);

/// How much closer the effective fixation lies than `fixation_distance` when
/// the vergence angle is increased by the offset.
double offset_as_fixation_shift(const PerturbationParams& params, double fixation_distance,
                                const EyeGeometry& eyes);

/// Fixation distance in [lo, hi] at which offset_as_fixation_shift() equals
/// `shift` (bisection; the shift is monotone in distance for beta > 0).
double fixation_distance_for_shift(const PerturbationParams& params, double shift,
                                   const EyeGeometry& eyes, double lo, double hi);

struct EndpointPrediction {
    double endpoint = 0.0;  // m, along the line of sight
    double error = 0.0;     // endpoint - target
};

/// Disparity-matching endpoint for an on-axis target: the depth whose
/// subtended angle equals tau(target) + beta.
EndpointPrediction predict_endpoint(double target_distance, const PerturbationParams& params,
                                    const EyeGeometry& eyes);

/// Where a fixated point is perceived under the offset: lateral coordinates
/// are kept and depth is solved so that the cyclopean distance equals the
/// perturbed distance. Inverse of correction's transform_point().
ScenePoint perceived_point(const ScenePoint& point, const EyeGeometry& eyes,
                           const PerturbationParams& params);

/// Hand-target disparity difference: disparity of the hand minus disparity of
/// the target. The fixation angle cancels, leaving tau(target) - tau(hand), so
/// a hand nearer than the target gives a negative value.
double disparity_difference(const ScenePoint& hand_view, const ScenePoint& target_view,
                            const EyeGeometry& eyes);

/// Desk-scale prediction for a target `reach_distance` metres ahead of the
/// home position (world origin, +z toward the targets). Returns the world
/// depth of the perceived target minus the reach distance, which equals the
/// predicted distance error for a movement starting at home.
double predicted_reach_error(double reach_distance, const EyeGeometry& eyes,
                             const PerturbationParams& params, const RigidTransform& view_from_world);

/// Partial derivatives of predicted_reach_error() with respect to the offset
/// and the IPD.
struct ReachErrorGradient {
    double value = 0.0;
    double d_beta = 0.0;
    double d_ipd = 0.0;
};
ReachErrorGradient predicted_reach_error_gradient(double reach_distance, double ipd, double beta,
                                                  const RigidTransform& view_from_world);

struct PredictionRow {
    double distance = 0.0;
    double predicted_error = 0.0;
};

/// (distance, predicted endpoint error) pairs for CSV export.
std::vector<PredictionRow> prediction_curve(std::span<const double> distances,
                                            const PerturbationParams& params, const EyeGeometry& eyes);

}  // namespace vac
