#pragma once

// Seeded synthetic experiments: participants with known IPDs, trials whose
// endpoints follow the vergence-offset model, and minimum-jerk trajectories.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vac/kinematics.hpp"
#include "vac/pose.hpp"
#include "vac/units.hpp"

namespace vac {

enum class IpdDistribution { uniform, normal };
enum class VisualCondition { original, transformed };
enum class Feedback { online, feedforward };

std::string_view to_string(VisualCondition c);
std::string_view to_string(Feedback f);

struct SimConfig {
    std::size_t n_participants = 20;
    IpdDistribution ipd_distribution = IpdDistribution::uniform;
    double ipd_low = 0.058;   // uniform bounds, or clip bounds for normal
    double ipd_high = 0.068;
    double ipd_mean = 0.063;  // normal only
    double ipd_sd = 0.003;
    double beta = deg_to_rad(0.22);             // true offset, rad
    double correction_beta = deg_to_rad(0.22);  // offset the corrected scene compensates
    double motor_noise_sd = 0.005;              // m, along depth
    std::vector<double> target_distances{0.20, 0.25, 0.30, 0.35};
    std::size_t repetitions = 16;
    double movement_duration = 0.6;  // s
    std::vector<VisualCondition> conditions{VisualCondition::original};
    std::vector<Feedback> feedbacks{Feedback::online};
    double feedforward_variance_factor = 1.5;
    /// Per-participant response multiplier on the offset, drawn from
    /// {1, 0, -0.5} with these weights when enabled.
    bool heterogeneity = false;
    std::array<double, 3> heterogeneity_weights{1.0, 1.0, 1.0};
    double sample_rate = kDefaultSampleRate;
    double rest_before = 0.3;  // s
    double rest_after = 0.3;   // s
    double trajectory_noise_sd = 0.0;  // m, white noise low-passed at trajectory_noise_cutoff
    double trajectory_noise_cutoff = 10.0;
    RigidTransform view_from_world = default_eye_pose();
    std::uint64_t seed = 1;

    /// Throws ValidationError naming the first invalid field.
    void validate() const;
};

struct Participant {
    std::string id;
    double ipd = 0.0;
    double beta_multiplier = 1.0;
};

struct SimTrial {
    std::string trial_id;
    std::string participant_id;
    VisualCondition condition = VisualCondition::original;
    Feedback feedback = Feedback::online;
    double target_distance = 0.0;
    ScenePoint target;    // world
    ScenePoint endpoint;  // world
    double distance_error = 0.0;
    double endpoint_error = 0.0;
    double disparity_difference = 0.0;
    double true_ipd = 0.0;
    double true_beta = 0.0;  // offset acting on this trial
};

/// Deterministic per seed; each participant draws from its own stream.
std::vector<Participant> generate_participants(const SimConfig& config);

/// One trial per participant x feedback x condition x distance x repetition.
std::vector<SimTrial> generate_trials(const SimConfig& config, const std::vector<Participant>& participants);

/// Minimum-jerk movement from home to each trial's endpoint, with rest
/// padding before and after.
std::vector<Trajectory> generate_trajectories(const SimConfig& config, const std::vector<SimTrial>& trials);

/// Metadata for the kinematics pipeline.
std::vector<TrialInfo> trial_infos(const std::vector<SimTrial>& trials);

/// Minimum-jerk position fraction s(u) = 10u^3 - 15u^4 + 6u^5 and its rate.
double minimum_jerk_position(double u);
double minimum_jerk_velocity(double u);  // ds/du

}  // namespace vac
