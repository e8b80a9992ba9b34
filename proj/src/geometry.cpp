#include "vac/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vac/errors.hpp"

namespace vac {
namespace {

void require_in_front(const ScenePoint& p, const char* what) {
    if (!(p.z > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
        throw DomainError(std::string(what) + " must have finite coordinates and positive depth (z = " +
                          std::to_string(p.z) + ")");
    }
}

double azimuth_from(const ScenePoint& eye, const ScenePoint& p) {
    return std::atan2(p.x - eye.x, p.z - eye.z);
}

}  // namespace

double ScenePoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

EyeGeometry::EyeGeometry(double ipd_m) : ipd_(ipd_m) {
    if (!(ipd_m > 0.0 && ipd_m < 0.1)) {
        throw ValidationError("ipd", "must lie in (0, 0.1) m, got " + std::to_string(ipd_m));
    }
}

FixationState::FixationState(const ScenePoint& point, const EyeGeometry& eyes)
    : point_(point), vergence_(subtended_angle(point, eyes)) {}

double subtended_angle(const ScenePoint& point, const EyeGeometry& eyes) {
    require_in_front(point, "point");
    return 2.0 * std::atan2(eyes.half_ipd(), point.norm());
}

double binocular_subtense(const ScenePoint& point, const EyeGeometry& eyes) {
    require_in_front(point, "point");
    return azimuth_from(eyes.left_eye(), point) - azimuth_from(eyes.right_eye(), point);
}

VisualAnglePair visual_angles(const ScenePoint& point, const FixationState& fixation,
                              const EyeGeometry& eyes) {
    require_in_front(point, "point");
    require_in_front(fixation.point(), "fixation");
    const ScenePoint left = eyes.left_eye();
    const ScenePoint right = eyes.right_eye();
    return {azimuth_from(left, fixation.point()) - azimuth_from(left, point),
            azimuth_from(right, fixation.point()) - azimuth_from(right, point)};
}

double disparity(const VisualAnglePair& angles) { return angles.left - angles.right; }

double disparity_from_vergence(double vergence, double target_angle) {
    return vergence - target_angle;
}

double distance_from_angle(double target_angle, const EyeGeometry& eyes) {
    if (!(target_angle > 0.0 && target_angle < std::numbers::pi)) {
        throw DomainError("subtended angle must lie in (0, pi), got " + std::to_string(target_angle));
    }
    return eyes.half_ipd() / std::tan(0.5 * target_angle);
}

std::vector<double> central_difference(std::span<const double> values, double sample_rate) {
    if (values.size() < 3) {
        throw ValidationError("samples", "at least 3 samples are required for differentiation");
    }
    if (!(sample_rate > 0.0)) {
        throw ValidationError("sample_rate", "must be positive");
    }
    const std::size_t n = values.size();
    std::vector<double> out(n);
    out[0] = (values[1] - values[0]) * sample_rate;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = (values[i + 1] - values[i - 1]) * (0.5 * sample_rate);
    }
    out[n - 1] = (values[n - 1] - values[n - 2]) * sample_rate;
    return out;
}

std::vector<double> cdot(const AngleTimeSeries& series) {
    std::vector<double> delta;
    delta.reserve(series.samples.size());
    for (const auto& s : series.samples) delta.push_back(disparity(s));
    return central_difference(delta, series.sample_rate);
}

std::vector<double> iovd(const AngleTimeSeries& series) {
    std::vector<double> left, right;
    left.reserve(series.samples.size());
    right.reserve(series.samples.size());
    for (const auto& s : series.samples) {
        left.push_back(s.left);
        right.push_back(s.right);
    }
    auto out = central_difference(left, series.sample_rate);
    const auto right_rate = central_difference(right, series.sample_rate);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= right_rate[i];
    return out;
}

}  // namespace vac
