#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "vac/correction.hpp"

namespace vac {

/// An ASCII OBJ file held line by line so that everything except vertex
/// positions can be written back untouched.
struct ObjDocument {
    std::vector<std::string> lines;
    std::vector<std::size_t> vertex_lines;  // line index of each `v` record
    MeshModel mesh;                         // polygons fan-triangulated
    std::size_t normal_count = 0;           // `vn` records, passed through unchanged
};

/// Throws DataError with the line number for malformed records.
ObjDocument read_obj(std::istream& in, const std::string& source);
ObjDocument read_obj_file(const std::string& path);

/// Writes `doc` with its vertex positions replaced by `vertices`. A vertex
/// whose coordinates are bitwise unchanged keeps its original text.
void write_obj(std::ostream& out, const ObjDocument& doc, const std::vector<ScenePoint>& vertices);

/// CSV point list with header `x,y,z` (metres).
std::vector<ScenePoint> read_points_csv(std::istream& in, const std::string& source);
void write_points_csv(std::ostream& out, const std::vector<ScenePoint>& points);

}  // namespace vac
