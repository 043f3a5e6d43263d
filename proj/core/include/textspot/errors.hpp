#pragma once

#include <stdexcept>
#include <string>

namespace textspot {

/// Raised when a domain object violates its invariants (degenerate polygon,
/// malformed box, mismatched dimensions, infeasible matching, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when an external file does not match its documented schema.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace textspot
