#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hkvar {

/// Input lies outside the region where an operation is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A function evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::vector<double> point)
        : std::runtime_error(what), point_(std::move(point)) {}

    const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

/// Malformed grid file or report destination.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A theorem check was asked to run on an input that violates its hypothesis.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_point(const std::vector<double>& p);

} // namespace hkvar
