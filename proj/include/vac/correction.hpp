#pragma once

// Depth remapping that cancels a known vergence offset: each point is pushed
// to the depth whose subtended angle is smaller by the offset, so that the
// distorted percept lands on the intended location.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vac/geometry.hpp"
#include "vac/perception.hpp"
#include "vac/pose.hpp"

namespace vac {

enum class CorrectionConvention {
    /// tau = 2 atan2(ipd/2, z); tau~ = tau - beta; z~ = (ipd/2) / tan(tau~/2).
    reconciled,
    /// theta = atan2(ipd/2, z); theta~ = theta - beta; z~ = (ipd/2) / tan(theta~).
    /// Subtracts the offset from the half angle, i.e. corrects for 2 beta.
    literal_half_angle,
};

/// Corrected viewing distance for an on-axis point at `z_view`.
/// Throws DomainError("point too distant to correct") when the reduced angle
/// is not positive.
double remap_depth(double z_view, const EyeGeometry& eyes, const PerturbationParams& params,
                   CorrectionConvention convention = CorrectionConvention::reconciled);

/// Keeps x and y, replaces z so that the cyclopean distance becomes the
/// corrected distance of the point's cyclopean distance.
ScenePoint transform_point(const ScenePoint& p, const EyeGeometry& eyes, const PerturbationParams& params,
                           CorrectionConvention convention = CorrectionConvention::reconciled);

struct MeshModel {
    std::vector<ScenePoint> vertices;
    std::vector<std::array<std::size_t, 3>> faces;  // zero-based
    std::string source;

    /// Throws ValidationError for an empty vertex list or an out-of-range index.
    void validate() const;
};

/// Vertexwise transform_point() in the view frame. Vertices are mapped into
/// view space with `view_from_world`, corrected, and mapped back. Faces and
/// vertex order are preserved. A failing vertex aborts with its index.
MeshModel transform_mesh(const MeshModel& mesh, const EyeGeometry& eyes, const PerturbationParams& params,
                         CorrectionConvention convention = CorrectionConvention::reconciled,
                         const RigidTransform& view_from_world = RigidTransform::identity());

struct CorrectionRow {
    double distance = 0.0;
    double original_error = 0.0;
    double transformed_error = 0.0;
};

/// Predicted endpoint errors for on-axis targets, before and after correction.
std::vector<CorrectionRow> predicted_correction_curve(std::span<const double> distances,
                                                      const EyeGeometry& eyes,
                                                      const PerturbationParams& params);

/// Same for targets `distances` metres ahead of the home position, with the
/// eye placed by `view_from_world`. Errors are along the world depth axis.
std::vector<CorrectionRow> predicted_correction_curve(std::span<const double> distances,
                                                      const EyeGeometry& eyes,
                                                      const PerturbationParams& params,
                                                      const RigidTransform& view_from_world);

}  // namespace vac
