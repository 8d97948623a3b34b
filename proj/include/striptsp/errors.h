#pragma once

#include <stdexcept>
#include <string>

namespace striptsp {

// Error kinds raised across the toolkit. Callers that only care about
// "something was wrong with the input" can catch std::exception.

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// A separator passes through a point, or x-coordinates tie where a
// combinatorial separator is required.
struct DegenerateSeparatorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A long computation ran past the deadline its caller set.
struct DeadlineExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace striptsp
