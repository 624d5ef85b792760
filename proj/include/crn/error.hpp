#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A network or system violates a structural invariant (self-loop, duplicate edge, bad rate, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class NotSingleTargetError : public Error {
public:
    using Error::Error;
};

/// The target is not in the relative interior of the Newton polytope, so the
/// Birch potential has no minimizer.
class NotInteriorError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class NotReversibleError : public Error {
public:
    using Error::Error;
};

class MissingEdgeError : public Error {
public:
    using Error::Error;
};

class NonPositiveStateError : public Error {
public:
    using Error::Error;
};

class UnboundedError : public Error {
public:
    using Error::Error;
};

}  // namespace crn
