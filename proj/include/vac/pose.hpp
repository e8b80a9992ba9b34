#pragma once

#include <Eigen/Core>

#include "vac/geometry.hpp"

namespace vac {

/// p' = rotation * p + translation. Used as the view-from-world transform
/// that places the cyclopean eye at the origin looking down +z.
class RigidTransform {
public:
    RigidTransform() = default;
    /// Throws ValidationError if `rotation` is not orthonormal with det +1.
    RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

    static RigidTransform identity() { return {}; }

    /// Eye placed `behind` metres behind and `above` metres above the home
    /// position (world origin), axes aligned with the world frame.
    static RigidTransform eye_behind_above(double behind, double above);

    ScenePoint apply(const ScenePoint& p) const;
    RigidTransform inverse() const;

    const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
    const Eigen::Vector3d& translation() const noexcept { return translation_; }

private:
    Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Default desk geometry: eye 0.30 m behind and 0.35 m above the home position.
inline constexpr double kDefaultEyeBehindHome = 0.30;
inline constexpr double kDefaultEyeAboveHome = 0.35;

inline RigidTransform default_eye_pose() {
    return RigidTransform::eye_behind_above(kDefaultEyeBehindHome, kDefaultEyeAboveHome);
}

}  // namespace vac
