#include "vac/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "vac/csv.hpp"
#include "vac/errors.hpp"

namespace vac {
namespace {

double parse_number(std::string_view token, const std::string& source, std::size_t lineno) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw DataError(source, lineno, "not a number: '" + std::string(token) + "'");
    }
    return value;
}

// Accepts `i`, `i/t`, `i//n`, `i/t/n`; negative indices are relative.
std::size_t parse_face_index(std::string_view token, std::size_t vertex_count, const std::string& source,
                             std::size_t lineno) {
    const std::string_view head = token.substr(0, token.find('/'));
    long long idx = 0;
    const auto res = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (res.ec != std::errc() || res.ptr != head.data() + head.size() || idx == 0) {
        throw DataError(source, lineno, "bad face index '" + std::string(token) + "'");
    }
    const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
        throw DataError(source, lineno, "face index " + std::to_string(idx) + " out of range");
    }
    return static_cast<std::size_t>(resolved);
}

}  // namespace

ObjDocument read_obj(std::istream& in, const std::string& source) {
    ObjDocument doc;
    doc.mesh.source = source;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            std::string a, b, c;
            if (!(ss >> a >> b >> c)) throw DataError(source, lineno, "vertex needs three coordinates");
            doc.mesh.vertices.push_back({parse_number(a, source, lineno), parse_number(b, source, lineno),
                                         parse_number(c, source, lineno)});
            doc.vertex_lines.push_back(doc.lines.size());
        } else if (tag == "vn") {
            ++doc.normal_count;
        } else if (tag == "f") {
            std::vector<std::size_t> idx;
            std::string token;
            while (ss >> token) idx.push_back(parse_face_index(token, doc.mesh.vertices.size(), source, lineno));
            if (idx.size() < 3) throw DataError(source, lineno, "face needs at least three vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) doc.mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
        doc.lines.push_back(std::move(line));
    }
    if (doc.mesh.vertices.empty()) throw DataError(source, lineno, "no vertices");
    return doc;
}

ObjDocument read_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path, 0, "cannot open file");
    return read_obj(in, path);
}

void write_obj(std::ostream& out, const ObjDocument& doc, const std::vector<ScenePoint>& vertices) {
    if (vertices.size() != doc.vertex_lines.size()) {
        throw ValidationError("vertices", "vertex count does not match the document");
    }
    std::size_t next = 0;
    for (std::size_t i = 0; i < doc.lines.size(); ++i) {
        if (next < doc.vertex_lines.size() && doc.vertex_lines[next] == i) {
            const ScenePoint& v = vertices[next];
            if (v == doc.mesh.vertices[next]) {
                out << doc.lines[i] << '\n';
            } else {
                out << "v " << csv::format_double(v.x) << ' ' << csv::format_double(v.y) << ' '
                    << csv::format_double(v.z) << '\n';
            }
            ++next;
        } else {
            out << doc.lines[i] << '\n';
        }
    }
}

std::vector<ScenePoint> read_points_csv(std::istream& in, const std::string& source) {
    const auto table = csv::Table::read(in, source);
    std::vector<ScenePoint> points;
    points.reserve(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        points.push_back({table.number(r, "x"), table.number(r, "y"), table.number(r, "z")});
    }
    return points;
}

void write_points_csv(std::ostream& out, const std::vector<ScenePoint>& points) {
    out << "x,y,z\n";
    for (const auto& p : points) {
        out << csv::format_double(p.x) << ',' << csv::format_double(p.y) << ',' << csv::format_double(p.z) << '\n';
    }
}

}  // namespace vac
