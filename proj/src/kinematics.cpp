#include "vac/kinematics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "vac/butterworth.hpp"
#include "vac/errors.hpp"
#include "vac/perception.hpp"

namespace vac {
namespace {

double coord(const TrajectorySample& s, int k) { return k == 0 ? s.x : (k == 1 ? s.y : s.z); }

void apply_axis_map(Trajectory& traj, const AxisMap& map) {
    if (map.source == std::array<int, 3>{0, 1, 2} && map.sign == std::array<double, 3>{1.0, 1.0, 1.0}) return;
    for (auto& s : traj.samples) {
        const TrajectorySample raw = s;
        s.x = map.sign[0] * coord(raw, map.source[0]);
        s.y = map.sign[1] * coord(raw, map.source[1]);
        s.z = map.sign[2] * coord(raw, map.source[2]);
    }
}

struct Moments {
    double mean = 0.0;
    double half_width = std::numeric_limits<double>::quiet_NaN();
};

Moments mean_ci95(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    double sum = 0.0;
    for (double x : v) sum += x;
    m.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return m;
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    const double n = static_cast<double>(v.size());
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    m.half_width = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
    return m;
}

}  // namespace

std::vector<double> Trajectory::axis(int k) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(coord(s, k));
    return out;
}

std::string_view to_string(RejectionReason reason) {
    switch (reason) {
        case RejectionReason::none: return "none";
        case RejectionReason::false_start: return "false_start";
        case RejectionReason::slow_movement: return "slow_movement";
        case RejectionReason::missing_data: return "missing_data";
        case RejectionReason::too_short: return "too_short";
    }
    return "unknown";
}

RejectionReason regularize(Trajectory& traj) {
    if (!(traj.sample_rate > 0.0)) throw ValidationError("sample_rate", "must be positive");
    for (const auto& s : traj.samples) {
        if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
            return RejectionReason::missing_data;
        }
    }
    const double period = 1.0 / traj.sample_rate;
    std::vector<TrajectorySample> out;
    out.reserve(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (i > 0) {
            const TrajectorySample& a = traj.samples[i - 1];
            const TrajectorySample& b = traj.samples[i];
            const double dt = b.t - a.t;
            if (!(dt > 0.0)) {
                throw DataError(traj.trial_id, i + 1, "timestamps must be strictly increasing");
            }
            const double steps = dt / period;
            const double k = std::round(steps);
            if (k < 1.0 || std::abs(steps - k) > 0.01 * k) {
                throw DataError(traj.trial_id, i + 1, "sample interval deviates from the nominal period by more than 1%");
            }
            if (k > 3.0) return RejectionReason::missing_data;
            for (int j = 1; j < static_cast<int>(k); ++j) {
                const double w = j / k;
                out.push_back({a.t + w * dt, a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), a.z + w * (b.z - a.z)});
            }
        }
        out.push_back(traj.samples[i]);
    }
    traj.samples = std::move(out);
    if (traj.samples.size() < kMinTrajectorySamples) return RejectionReason::too_short;
    return RejectionReason::none;
}

Trajectory lowpass_filter(const Trajectory& traj, double cutoff_hz) {
    const Biquad f = butterworth_lowpass(cutoff_hz, traj.sample_rate);
    const auto x = filtfilt(f, traj.axis(0));
    const auto y = filtfilt(f, traj.axis(1));
    const auto z = filtfilt(f, traj.axis(2));
    Trajectory out{traj.trial_id, traj.sample_rate, traj.samples};
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i].x = x[i];
        out.samples[i].y = y[i];
        out.samples[i].z = z[i];
    }
    return out;
}

VelocitySeries differentiate(const Trajectory& traj) {
    VelocitySeries v;
    v.sample_rate = traj.sample_rate;
    v.t.reserve(traj.samples.size());
    for (const auto& s : traj.samples) v.t.push_back(s.t);
    v.vx = central_difference(traj.axis(0), traj.sample_rate);
    v.vy = central_difference(traj.axis(1), traj.sample_rate);
    v.vz = central_difference(traj.axis(2), traj.sample_rate);
    return v;
}

std::optional<MovementSegment> detect_segment(std::span<const double> depth_velocity, double sample_rate,
                                              const SegmentOptions& options) {
    if (!(sample_rate > 0.0)) throw ValidationError("sample_rate", "must be positive");
    if (!(options.threshold >= 0.0)) throw ValidationError("threshold", "must be non-negative");
    const std::size_t n = depth_velocity.size();
    const auto hold = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(options.hold_time * sample_rate)));
    if (n < hold) return std::nullopt;

    auto run_holds = [&](std::size_t i, auto pred) {
        if (i + hold > n) return false;
        for (std::size_t k = i; k < i + hold; ++k)
            if (!pred(depth_velocity[k])) return false;
        return true;
    };
    const auto above = [&](double v) { return v > options.threshold; };
    const auto below = [&](double v) { return v < options.threshold; };

    std::size_t onset = n;
    for (std::size_t i = 0; i + hold <= n; ++i) {
        if (run_holds(i, above)) {
            onset = i;
            break;
        }
    }
    if (onset == n) return std::nullopt;

    const auto peak = static_cast<std::size_t>(
        std::max_element(depth_velocity.begin() + static_cast<std::ptrdiff_t>(onset), depth_velocity.end()) -
        depth_velocity.begin());
    for (std::size_t j = peak + 1; j + hold <= n; ++j) {
        if (run_holds(j, below)) {
            return MovementSegment{onset, j, static_cast<double>(onset) / sample_rate,
                                   static_cast<double>(j) / sample_rate};
        }
    }
    return std::nullopt;
}

TrialOutcome trial_outcome(const Trajectory& traj, const TrialInfo& info, const EyeGeometry& eyes,
                           const RigidTransform& view_from_world, const AnalysisOptions& options) {
    TrialOutcome out;
    out.trial_id = traj.trial_id;
    out.participant_id = info.participant_id;
    out.condition = info.condition;
    out.feedback = info.feedback;
    out.target_distance = info.target.z;

    Trajectory work = traj;
    apply_axis_map(work, options.axes);
    out.rejection = regularize(work);
    if (out.rejection != RejectionReason::none) return out;

    const Trajectory filtered = lowpass_filter(work, options.cutoff_hz);
    const VelocitySeries vel = differentiate(filtered);
    auto segment = detect_segment(vel.vz, filtered.sample_rate, options.segment);
    if (!segment) {
        out.rejection = RejectionReason::slow_movement;
        return out;
    }
    segment->onset_time = filtered.samples[segment->onset_index].t;
    segment->termination_time = filtered.samples[segment->termination_index].t;
    out.segment = segment;

    const auto go = options.go_time ? options.go_time : info.go_time;
    if (go && segment->onset_time < *go) {
        out.rejection = RejectionReason::false_start;
        return out;
    }

    const TrajectorySample& start = filtered.samples[segment->onset_index];
    const TrajectorySample& end = filtered.samples[segment->termination_index];
    out.movement_distance = end.z - start.z;
    out.distance_error = out.movement_distance - out.target_distance;
    out.endpoint_error = end.z - info.target.z;
    out.disparity_difference = disparity_difference(view_from_world.apply({end.x, end.y, end.z}),
                                                    view_from_world.apply(info.target), eyes);
    out.peak_velocity = *std::max_element(vel.vz.begin() + static_cast<std::ptrdiff_t>(segment->onset_index),
                                          vel.vz.begin() + static_cast<std::ptrdiff_t>(segment->termination_index) + 1);
    out.valid = true;
    return out;
}

std::vector<TrialOutcome> analyze_trials(std::vector<Trajectory> trajectories, std::span<const TrialInfo> infos,
                                         const EyeGeometry& eyes, const RigidTransform& view_from_world,
                                         const AnalysisOptions& options) {
    std::unordered_map<std::string, const TrialInfo*> by_id;
    for (const auto& info : infos) by_id.emplace(info.trial_id, &info);
    std::sort(trajectories.begin(), trajectories.end(),
              [](const Trajectory& a, const Trajectory& b) { return a.trial_id < b.trial_id; });
    std::vector<TrialOutcome> outcomes;
    outcomes.reserve(trajectories.size());
    for (const auto& traj : trajectories) {
        const auto it = by_id.find(traj.trial_id);
        if (it == by_id.end()) {
            throw ValidationError("targets", "no target entry for trial '" + traj.trial_id + "'");
        }
        outcomes.push_back(trial_outcome(traj, *it->second, eyes, view_from_world, options));
    }
    return outcomes;
}

std::vector<SummaryRow> summarize(std::span<const TrialOutcome> outcomes) {
    struct Bucket {
        std::vector<double> de, ee, dd;
    };
    std::map<std::pair<std::string, double>, Bucket> groups;
    for (const auto& o : outcomes) {
        if (!o.valid) continue;
        auto& b = groups[{o.condition, o.target_distance}];
        b.de.push_back(o.distance_error);
        b.ee.push_back(o.endpoint_error);
        b.dd.push_back(o.disparity_difference);
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, b] : groups) {
        SummaryRow r;
        r.condition = key.first;
        r.target_distance = key.second;
        r.n = b.de.size();
        const auto de = mean_ci95(b.de);
        const auto ee = mean_ci95(b.ee);
        const auto dd = mean_ci95(b.dd);
        r.mean_distance_error = de.mean;
        r.ci_distance_error = de.half_width;
        r.mean_endpoint_error = ee.mean;
        r.ci_endpoint_error = ee.half_width;
        r.mean_disparity_difference = dd.mean;
        r.ci_disparity_difference = dd.half_width;
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace vac
