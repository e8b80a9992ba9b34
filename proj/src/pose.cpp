#include "vac/pose.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vac/errors.hpp"

namespace vac {

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
    const double ortho = (rotation * rotation.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho < 1e-9) || std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw ValidationError("eye_pose.rotation", "must be a proper rotation matrix");
    }
    if (!translation.allFinite()) {
        throw ValidationError("eye_pose.translation", "must be finite");
    }
}

RigidTransform RigidTransform::eye_behind_above(double behind, double above) {
    return RigidTransform(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, -above, behind));
}

ScenePoint RigidTransform::apply(const ScenePoint& p) const {
    const Eigen::Vector3d q = rotation_ * Eigen::Vector3d(p.x, p.y, p.z) + translation_;
    return {q.x(), q.y(), q.z()};
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation_ = rotation_.transpose();
    inv.translation_ = -(inv.rotation_ * translation_);
    return inv;
}

}  // namespace vac
