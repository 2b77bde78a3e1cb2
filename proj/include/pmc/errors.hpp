#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

// Model-level validation failure (bad dimension, weight, zero-test index...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Checked 64-bit counter arithmetic overflowed.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its contract (e.g. trend not positive,
// critical counter with infinite expected return time).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A configurable node/iteration budget ran out before the answer was found.
struct ResourceExhausted : std::runtime_error {
    explicit ResourceExhausted(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pmc
