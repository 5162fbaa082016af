// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, policy, schedule or detector configuration.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Tensor or buffer dimensions that do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// NaN or infinity where a finite value is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Misuse of stateful objects: stale caches, out-of-order epochs, double firing.
class StateError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when one applies (0 otherwise).
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace clp
