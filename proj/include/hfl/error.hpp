#pragma once

#include <stdexcept>
#include <string>

namespace hfl {

// Raised when a numerical precondition or postcondition fails.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double location = 0.0, long index = -1)
        : std::runtime_error(what), location_(location), index_(index) {}
    double location() const { return location_; }
    long index() const { return index_; }

private:
    double location_;
    long index_;
};

// Raised on malformed input (rank mismatch, bad configuration).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace hfl
