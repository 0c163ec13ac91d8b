#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain where a formula is defined (e.g. t >= 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation point outside the sampled range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Input violates an operation's mathematical precondition (f(0) != 0, f not in Y, ...).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values or a degenerate computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace selfsim
