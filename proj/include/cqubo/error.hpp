#pragma once

#include <stdexcept>
#include <string>

namespace cqubo {

// Raised for malformed inputs: bad indices, mismatched schemes, unsatisfiable
// preconditions. Callers that map errors to exit codes treat this as "invalid
// argument".
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an operation is well-formed but cannot be carried out, e.g. an
// enumeration that exceeds its size cap or an empty feasible set.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqubo
