#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vac {

/// Raised when an input lies outside the domain of a geometric formula
/// (non-positive depth, angle underflow, negative radicand, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for an invalid parameter or configuration value. `field()` names
/// the offending field so the CLI can report it.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised for malformed input data. Carries the file and 1-based line.
class DataError : public std::runtime_error {
public:
    DataError(std::string file, std::size_t line, const std::string& message)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
          file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

}  // namespace vac
