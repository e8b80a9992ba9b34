#include "vac/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "vac/butterworth.hpp"
#include "vac/correction.hpp"
#include "vac/errors.hpp"
#include "vac/perception.hpp"

namespace vac {
namespace {

enum StreamTag : std::uint32_t { kParticipantStream = 0, kTrialStream = 1, kTrajectoryStream = 2 };

// Counter-based stream selection: the stream depends only on (seed, owner,
// tag, index), never on generation order.
std::mt19937_64 stream(std::uint64_t seed, std::size_t owner, StreamTag tag, std::size_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(owner), static_cast<std::uint32_t>(tag),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

std::string participant_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%02zu", i + 1);
    return buf;
}

}  // namespace

std::string_view to_string(VisualCondition c) { return c == VisualCondition::original ? "original" : "transformed"; }
std::string_view to_string(Feedback f) { return f == Feedback::online ? "online" : "feedforward"; }

void SimConfig::validate() const {
    if (n_participants == 0) throw ValidationError("n_participants", "must be at least 1");
    if (!(ipd_low > 0.0 && ipd_low <= ipd_high && ipd_high < 0.1)) {
        throw ValidationError("ipd", "bounds must satisfy 0 < low <= high < 0.1 m");
    }
    if (ipd_distribution == IpdDistribution::normal && !(ipd_sd >= 0.0)) {
        throw ValidationError("ipd_sd", "must be non-negative");
    }
    if (!(std::abs(beta) < 0.05)) throw ValidationError("beta", "|beta| must be below 0.05 rad");
    if (!(std::abs(correction_beta) < 0.05)) throw ValidationError("correction_beta", "|beta| must be below 0.05 rad");
    if (!(motor_noise_sd >= 0.0)) throw ValidationError("motor_noise_sd", "must be non-negative");
    if (target_distances.empty()) throw ValidationError("target_distances", "at least one distance is required");
    for (double d : target_distances)
        if (!(d > 0.0)) throw ValidationError("target_distances", "distances must be positive");
    if (repetitions == 0) throw ValidationError("repetitions", "must be at least 1");
    if (!(movement_duration > 0.0)) throw ValidationError("movement_duration", "must be positive");
    if (conditions.empty()) throw ValidationError("conditions", "at least one condition is required");
    if (feedbacks.empty()) throw ValidationError("feedbacks", "at least one feedback mode is required");
    if (!(feedforward_variance_factor > 0.0)) throw ValidationError("feedforward_variance_factor", "must be positive");
    for (double w : heterogeneity_weights)
        if (!(w >= 0.0)) throw ValidationError("heterogeneity_weights", "weights must be non-negative");
    if (heterogeneity && heterogeneity_weights[0] + heterogeneity_weights[1] + heterogeneity_weights[2] <= 0.0) {
        throw ValidationError("heterogeneity_weights", "weights must not all be zero");
    }
    if (!(sample_rate > 0.0)) throw ValidationError("sample_rate", "must be positive");
    if (!(rest_before >= 0.2)) throw ValidationError("rest_before", "must be at least 0.2 s");
    if (!(rest_after >= 0.0)) throw ValidationError("rest_after", "must be non-negative");
    if (!(trajectory_noise_sd >= 0.0)) throw ValidationError("trajectory_noise_sd", "must be non-negative");
    if (!(trajectory_noise_cutoff > 0.0 && trajectory_noise_cutoff < 0.5 * sample_rate)) {
        throw ValidationError("trajectory_noise_cutoff", "must lie in (0, Nyquist)");
    }
}

std::vector<Participant> generate_participants(const SimConfig& config) {
    config.validate();
    std::vector<Participant> out;
    out.reserve(config.n_participants);
    for (std::size_t i = 0; i < config.n_participants; ++i) {
        auto rng = stream(config.seed, i, kParticipantStream);
        Participant p;
        p.id = participant_id(i);
        if (config.ipd_distribution == IpdDistribution::uniform) {
            p.ipd = config.ipd_low == config.ipd_high
                        ? config.ipd_low
                        : std::uniform_real_distribution<double>(config.ipd_low, config.ipd_high)(rng);
        } else {
            const double draw = config.ipd_sd == 0.0
                                    ? config.ipd_mean
                                    : std::normal_distribution<double>(config.ipd_mean, config.ipd_sd)(rng);
            p.ipd = std::clamp(draw, config.ipd_low, config.ipd_high);
        }
        if (config.heterogeneity) {
            static constexpr std::array<double, 3> kMultipliers{1.0, 0.0, -0.5};
            std::discrete_distribution<int> pick(config.heterogeneity_weights.begin(),
                                                 config.heterogeneity_weights.end());
            p.beta_multiplier = kMultipliers[static_cast<std::size_t>(pick(rng))];
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<SimTrial> generate_trials(const SimConfig& config, const std::vector<Participant>& participants) {
    config.validate();
    const RigidTransform world_from_view = config.view_from_world.inverse();
    std::vector<SimTrial> trials;
    for (std::size_t pi = 0; pi < participants.size(); ++pi) {
        const Participant& part = participants[pi];
        const EyeGeometry eyes(part.ipd);
        const PerturbationParams acting{config.beta * part.beta_multiplier, std::nullopt};
        const PerturbationParams correction{config.correction_beta, std::nullopt};
        auto rng = stream(config.seed, pi, kTrialStream);
        std::normal_distribution<double> unit(0.0, 1.0);
        std::size_t counter = 0;
        for (Feedback fb : config.feedbacks) {
            for (VisualCondition cond : config.conditions) {
                for (double distance : config.target_distances) {
                    const ScenePoint target{0.0, 0.0, distance};
                    const ScenePoint target_view = config.view_from_world.apply(target);
                    ScenePoint aim = target;
                    double sd = config.motor_noise_sd;
                    if (fb == Feedback::feedforward) {
                        sd *= std::sqrt(config.feedforward_variance_factor);
                    } else {
                        const ScenePoint rendered = cond == VisualCondition::transformed
                                                        ? transform_point(target_view, eyes, correction)
                                                        : target_view;
                        aim = world_from_view.apply(perceived_point(rendered, eyes, acting));
                    }
                    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
                        SimTrial t;
                        char id[32];
                        std::snprintf(id, sizeof id, "%s_T%04zu", part.id.c_str(), ++counter);
                        t.trial_id = id;
                        t.participant_id = part.id;
                        t.condition = cond;
                        t.feedback = fb;
                        t.target_distance = distance;
                        t.target = target;
                        t.endpoint = aim;
                        if (sd > 0.0) t.endpoint.z += sd * unit(rng);
                        t.endpoint_error = t.endpoint.z - target.z;
                        t.distance_error = t.endpoint.z - distance;  // movement starts at home
                        t.disparity_difference = disparity_difference(config.view_from_world.apply(t.endpoint),
                                                                      target_view, eyes);
                        t.true_ipd = part.ipd;
                        t.true_beta = fb == Feedback::online ? acting.beta_offset : 0.0;
                        trials.push_back(std::move(t));
                    }
                }
            }
        }
    }
    return trials;
}

double minimum_jerk_position(double u) {
    u = std::clamp(u, 0.0, 1.0);
    const double u3 = u * u * u;
    return u3 * (10.0 - 15.0 * u + 6.0 * u * u);
}

double minimum_jerk_velocity(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = u * (1.0 - u);
    return 30.0 * w * w;
}

std::vector<Trajectory> generate_trajectories(const SimConfig& config, const std::vector<SimTrial>& trials) {
    config.validate();
    const double fs = config.sample_rate;
    const double total = config.rest_before + config.movement_duration + config.rest_after;
    const auto n = static_cast<std::size_t>(std::floor(total * fs)) + 1;
    const Biquad noise_filter = butterworth_lowpass(config.trajectory_noise_cutoff, fs);

    std::vector<std::string> pids;
    for (const auto& t : trials) {
        if (std::find(pids.begin(), pids.end(), t.participant_id) == pids.end()) pids.push_back(t.participant_id);
    }

    std::vector<Trajectory> out;
    out.reserve(trials.size());
    for (std::size_t ti = 0; ti < trials.size(); ++ti) {
        const SimTrial& trial = trials[ti];
        Trajectory traj;
        traj.trial_id = trial.trial_id;
        traj.sample_rate = fs;
        traj.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs;
            const double s = minimum_jerk_position((t - config.rest_before) / config.movement_duration);
            traj.samples[i] = {t, s * trial.endpoint.x, s * trial.endpoint.y, s * trial.endpoint.z};
        }
        if (config.trajectory_noise_sd > 0.0) {
            const auto owner = static_cast<std::size_t>(std::find(pids.begin(), pids.end(), trial.participant_id) -
                                                        pids.begin());
            auto rng = stream(config.seed, owner, kTrajectoryStream, ti);
            std::normal_distribution<double> noise(0.0, config.trajectory_noise_sd);
            for (int axis = 0; axis < 3; ++axis) {
                std::vector<double> w(n);
                for (auto& v : w) v = noise(rng);
                const auto smooth = filtfilt(noise_filter, w);
                for (std::size_t i = 0; i < n; ++i) {
                    auto& smp = traj.samples[i];
                    (axis == 0 ? smp.x : axis == 1 ? smp.y : smp.z) += smooth[i];
                }
            }
        }
        out.push_back(std::move(traj));
    }
    return out;
}

std::vector<TrialInfo> trial_infos(const std::vector<SimTrial>& trials) {
    std::vector<TrialInfo> infos;
    infos.reserve(trials.size());
    for (const auto& t : trials) {
        infos.push_back({t.trial_id, t.participant_id, std::string(to_string(t.condition)),
                         std::string(to_string(t.feedback)), t.target, std::nullopt});
    }
    return infos;
}

}  // namespace vac
