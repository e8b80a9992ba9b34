#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vac::csv {

/// Minimal reader for the plain comma-separated files this toolkit exchanges
/// (no quoting). The first non-empty line is the header.
class Table {
public:
    static Table read(std::istream& in, const std::string& source);
    static Table read_file(const std::string& path);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return cells_.size(); }
    bool has_column(std::string_view name) const;

    /// Throws DataError naming the file and line.
    const std::string& text(std::size_t row, std::string_view column) const;
    double number(std::size_t row, std::string_view column) const;
    std::size_t line_of(std::size_t row) const { return lines_.at(row); }
    const std::string& source() const noexcept { return source_; }

private:
    std::size_t column_index(std::string_view name) const;

    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> cells_;
    std::vector<std::size_t> lines_;
};

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace vac::csv
