#include "vac/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <system_error>

#include "vac/errors.hpp"

namespace vac::csv {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

Table Table::read(std::istream& in, const std::string& source) {
    Table t;
    t.source_ = source;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (t.header_.empty()) {
            t.header_ = std::move(fields);
            continue;
        }
        if (fields.size() != t.header_.size()) {
            throw DataError(source, lineno, "expected " + std::to_string(t.header_.size()) + " fields, found " +
                                                std::to_string(fields.size()));
        }
        t.cells_.push_back(std::move(fields));
        t.lines_.push_back(lineno);
    }
    if (t.header_.empty()) throw DataError(source, lineno, "missing header");
    return t;
}

Table Table::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path, 0, "cannot open file");
    return read(in, path);
}

bool Table::has_column(std::string_view name) const {
    for (const auto& h : header_)
        if (h == name) return true;
    return false;
}

std::size_t Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    throw DataError(source_, 1, "missing column '" + std::string(name) + "'");
}

const std::string& Table::text(std::size_t row, std::string_view column) const {
    return cells_.at(row)[column_index(column)];
}

double Table::number(std::size_t row, std::string_view column) const {
    const std::string& s = text(row, column);
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError(source_, lines_[row], "column '" + std::string(column) + "': not a number: '" + s + "'");
    }
    return value;
}

}  // namespace vac::csv
