#include "vac/correction.hpp"

#include <cmath>
#include <string>

#include "vac/errors.hpp"

namespace vac {
namespace {

std::string format_point(const ScenePoint& p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) + ")";
}

double corrected_distance(double distance, const EyeGeometry& eyes, const PerturbationParams& params,
                          CorrectionConvention convention) {
    if (!(distance > 0.0)) {
        throw DomainError("viewing distance must be positive");
    }
    const double half = eyes.half_ipd();
    if (convention == CorrectionConvention::literal_half_angle) {
        const double theta = std::atan2(half, distance) - params.beta_offset;
        if (!(theta > 0.0)) throw DomainError("point too distant to correct");
        return half / std::tan(theta);
    }
    const double tau = 2.0 * std::atan2(half, distance) - params.beta_offset;
    if (!(tau > 0.0)) throw DomainError("point too distant to correct");
    return half / std::tan(0.5 * tau);
}

}  // namespace

double remap_depth(double z_view, const EyeGeometry& eyes, const PerturbationParams& params,
                   CorrectionConvention convention) {
    return corrected_distance(z_view, eyes, params, convention);
}

ScenePoint transform_point(const ScenePoint& p, const EyeGeometry& eyes, const PerturbationParams& params,
                           CorrectionConvention convention) {
    if (!(p.z > 0.0)) {
        throw DomainError("point " + format_point(p) + " is not in front of the viewer");
    }
    if (params.beta_offset == 0.0) return p;
    const double d = corrected_distance(p.norm(), eyes, params, convention);
    const double radicand = d * d - p.x * p.x - p.y * p.y;
    if (!(radicand > 0.0)) {
        throw DomainError("corrected distance cannot keep the lateral coordinates of point " + format_point(p));
    }
    return {p.x, p.y, std::sqrt(radicand)};
}

void MeshModel::validate() const {
    if (vertices.empty()) {
        throw ValidationError("vertices", "mesh has no vertices");
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (std::size_t idx : faces[f]) {
            if (idx >= vertices.size()) {
                throw ValidationError("faces", "face " + std::to_string(f) + " references vertex " +
                                                   std::to_string(idx) + " of " +
                                                   std::to_string(vertices.size()));
            }
        }
    }
}

MeshModel transform_mesh(const MeshModel& mesh, const EyeGeometry& eyes, const PerturbationParams& params,
                         CorrectionConvention convention, const RigidTransform& view_from_world) {
    mesh.validate();
    const RigidTransform world_from_view = view_from_world.inverse();
    MeshModel out{{}, mesh.faces, mesh.source};
    out.vertices.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const ScenePoint& v = mesh.vertices[i];
        if (params.beta_offset == 0.0) {
            out.vertices.push_back(v);
            continue;
        }
        try {
            const ScenePoint view = view_from_world.apply(v);
            out.vertices.push_back(world_from_view.apply(transform_point(view, eyes, params, convention)));
        } catch (const DomainError& e) {
            throw DomainError("vertex " + std::to_string(i) + " " + format_point(v) + ": " + e.what());
        }
    }
    return out;
}

std::vector<CorrectionRow> predicted_correction_curve(std::span<const double> distances,
                                                      const EyeGeometry& eyes,
                                                      const PerturbationParams& params) {
    std::vector<CorrectionRow> rows;
    rows.reserve(distances.size());
    for (double d : distances) {
        const double original = predict_endpoint(d, params, eyes).error;
        const double rendered = remap_depth(d, eyes, params);
        const double transformed = predict_endpoint(rendered, params, eyes).endpoint - d;
        rows.push_back({d, original, transformed});
    }
    return rows;
}

std::vector<CorrectionRow> predicted_correction_curve(std::span<const double> distances,
                                                      const EyeGeometry& eyes,
                                                      const PerturbationParams& params,
                                                      const RigidTransform& view_from_world) {
    const RigidTransform world_from_view = view_from_world.inverse();
    std::vector<CorrectionRow> rows;
    rows.reserve(distances.size());
    for (double d : distances) {
        const ScenePoint target_view = view_from_world.apply({0.0, 0.0, d});
        const double original = predicted_reach_error(d, eyes, params, view_from_world);
        const ScenePoint rendered = transform_point(target_view, eyes, params);
        const double transformed = world_from_view.apply(perceived_point(rendered, eyes, params)).z - d;
        rows.push_back({d, original, transformed});
    }
    return rows;
}

}  // namespace vac
