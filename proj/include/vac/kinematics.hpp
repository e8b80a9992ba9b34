#pragma once

// Trajectory analysis for pointing movements: zero-phase low-pass filtering,
// central-difference velocity, threshold segmentation along the depth axis,
// and per-trial error measures.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vac/geometry.hpp"
#include "vac/pose.hpp"

namespace vac {

inline constexpr double kDefaultSampleRate = 250.0;    // Hz
inline constexpr double kDefaultCutoff = 10.0;         // Hz
inline constexpr double kDefaultVelocityThreshold = 0.05;  // m/s
inline constexpr double kDefaultHoldTime = 0.020;      // s
inline constexpr std::size_t kMinTrajectorySamples = 25;

struct TrajectorySample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;  // depth, toward the targets
};

struct Trajectory {
    std::string trial_id;
    double sample_rate = kDefaultSampleRate;
    std::vector<TrajectorySample> samples;

    std::vector<double> axis(int k) const;
};

enum class RejectionReason { none, false_start, slow_movement, missing_data, too_short };

std::string_view to_string(RejectionReason reason);

struct MovementSegment {
    std::size_t onset_index = 0;
    std::size_t termination_index = 0;
    double onset_time = 0.0;
    double termination_time = 0.0;
};

struct VelocitySeries {
    double sample_rate = 0.0;
    std::vector<double> t, vx, vy, vz;
};

struct SegmentOptions {
    double threshold = kDefaultVelocityThreshold;  // m/s
    double hold_time = kDefaultHoldTime;           // s a crossing must persist
};

/// Raw-column to canonical-axis mapping: canonical[k] = sign[k] * raw[source[k]].
struct AxisMap {
    std::array<int, 3> source{0, 1, 2};
    std::array<double, 3> sign{1.0, 1.0, 1.0};
};

struct AnalysisOptions {
    double cutoff_hz = kDefaultCutoff;
    SegmentOptions segment;
    std::optional<double> go_time;  // s; onset before it is a false start
    AxisMap axes;
};

/// Per-trial metadata supplied alongside the trajectory.
struct TrialInfo {
    std::string trial_id;
    std::string participant_id;
    std::string condition;
    std::string feedback;
    ScenePoint target;  // world frame, home position at the origin
    std::optional<double> go_time;
};

struct TrialOutcome {
    std::string trial_id;
    std::string participant_id;
    std::string condition;
    std::string feedback;
    double target_distance = 0.0;  // reach distance along the depth axis
    bool valid = false;
    RejectionReason rejection = RejectionReason::none;
    std::optional<MovementSegment> segment;
    double movement_distance = 0.0;
    double distance_error = 0.0;
    double endpoint_error = 0.0;
    double disparity_difference = 0.0;  // rad
    double peak_velocity = 0.0;         // m/s along depth
};

/// Checks timestamps and fills gaps of one or two missing samples by linear
/// interpolation. Returns the rejection reason for unusable data (larger gaps,
/// non-finite values, fewer than 25 samples). Throws DataError for timestamps
/// that do not increase or are irregular beyond 1 % of the nominal period.
RejectionReason regularize(Trajectory& traj);

/// Zero-phase 2nd-order Butterworth applied to each axis.
Trajectory lowpass_filter(const Trajectory& traj, double cutoff_hz);

/// Central-difference velocity, one-sided at the ends.
VelocitySeries differentiate(const Trajectory& traj);

/// Onset: first sample above threshold that stays above for the hold time.
/// Termination: first sample after peak velocity that falls below threshold
/// and stays below for the hold time. Empty when no such crossing exists.
std::optional<MovementSegment> detect_segment(std::span<const double> depth_velocity, double sample_rate,
                                              const SegmentOptions& options = {});

/// Full pipeline for one trial. Distances are measured on the filtered
/// depth coordinate. The disparity difference uses the endpoint and target
/// positions mapped into the eye frame by `view_from_world`.
TrialOutcome trial_outcome(const Trajectory& traj, const TrialInfo& info, const EyeGeometry& eyes,
                           const RigidTransform& view_from_world, const AnalysisOptions& options = {});

/// Runs trial_outcome() for every trajectory with matching info, ordered by
/// trial_id. Trajectories without info throw ValidationError.
std::vector<TrialOutcome> analyze_trials(std::vector<Trajectory> trajectories, std::span<const TrialInfo> infos,
                                         const EyeGeometry& eyes, const RigidTransform& view_from_world,
                                         const AnalysisOptions& options = {});

struct SummaryRow {
    std::string condition;
    double target_distance = 0.0;
    std::size_t n = 0;
    double mean_distance_error = 0.0, ci_distance_error = 0.0;
    double mean_endpoint_error = 0.0, ci_endpoint_error = 0.0;
    double mean_disparity_difference = 0.0, ci_disparity_difference = 0.0;
};

/// Means and 95 % confidence half-widths (Student t) of valid trials grouped
/// by (condition, target distance).
std::vector<SummaryRow> summarize(std::span<const TrialOutcome> outcomes);

}  // namespace vac
