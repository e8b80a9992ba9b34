#pragma once

// Binocular viewing geometry.
//
// Frame: cyclopean eye at the origin, +x rightward, +y upward, +z forward
// (depth). The left eye sits at (-ipd/2, 0, 0), the right eye at (+ipd/2, 0, 0).
// All angles are radians.

#include <span>
#include <vector>

namespace vac {

struct ScenePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    /// Distance from the cyclopean eye.
    double norm() const;

    friend bool operator==(const ScenePoint&, const ScenePoint&) = default;
};

class EyeGeometry {
public:
    /// Throws ValidationError unless 0 < ipd < 0.1 m.
    explicit EyeGeometry(double ipd_m);

    double ipd() const noexcept { return ipd_; }
    double half_ipd() const noexcept { return 0.5 * ipd_; }
    ScenePoint left_eye() const noexcept { return {-half_ipd(), 0.0, 0.0}; }
    ScenePoint right_eye() const noexcept { return {half_ipd(), 0.0, 0.0}; }

private:
    double ipd_;
};

/// Signed horizontal visual angles of a point relative to each eye's line of
/// sight. Negative when the point lies to the right of the fixation direction.
struct VisualAnglePair {
    double left = 0.0;
    double right = 0.0;
};

/// A fixated point and the vergence angle it induces.
class FixationState {
public:
    FixationState(const ScenePoint& point, const EyeGeometry& eyes);

    const ScenePoint& point() const noexcept { return point_; }
    /// Full vergence angle, using the cyclopean-distance definition of
    /// subtended_angle().
    double vergence() const noexcept { return vergence_; }

private:
    ScenePoint point_;
    double vergence_;
};

struct AngleTimeSeries {
    double sample_rate = 0.0;  // Hz
    std::vector<VisualAnglePair> samples;
};

/// Full angle subtended at the two eyes by a point at cyclopean distance d:
/// 2 atan2(ipd/2, d). Off-axis points use their cyclopean distance.
double subtended_angle(const ScenePoint& point, const EyeGeometry& eyes);

/// Exact horizontal-plane angle between the two eyes' lines of sight to a
/// point (azimuth difference). Coincides with subtended_angle() on the
/// midline of the horizontal plane.
double binocular_subtense(const ScenePoint& point, const EyeGeometry& eyes);

VisualAnglePair visual_angles(const ScenePoint& point, const FixationState& fixation,
                              const EyeGeometry& eyes);

/// delta = alpha_L - alpha_R
double disparity(const VisualAnglePair& angles);

/// delta = phi - tau. Positive when the target is farther than fixation.
double disparity_from_vergence(double vergence, double target_angle);

/// Triangulated cyclopean distance (ipd/2) / tan(tau/2). Requires 0 < tau < pi.
double distance_from_angle(double target_angle, const EyeGeometry& eyes);

/// First derivative by central differences, one-sided at both ends.
/// Requires at least 3 samples.
std::vector<double> central_difference(std::span<const double> values, double sample_rate);

/// Change of disparity over time: d(alpha_L - alpha_R)/dt.
std::vector<double> cdot(const AngleTimeSeries& series);

/// Interocular velocity difference: d(alpha_L)/dt - d(alpha_R)/dt.
std::vector<double> iovd(const AngleTimeSeries& series);

}  // namespace vac
