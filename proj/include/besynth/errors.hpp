#pragma once

#include <stdexcept>
#include <string>

namespace besynth {

// Formula text could not be tokenized or parsed; `position` is a 0-based
// offset into the input string.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// A domain file violates the JSON schema (missing field, unknown name,
// conflicting duplicate transition, transition without precondition, ...).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain is well-formed JSON-wise but breaks the domain rules (R1-R3 or
// delta totality); the message names the first offending state and rule.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured resource budget (state cap, enumeration cap) was exceeded.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cooperative deadline expired inside a long-running construction or solve.
class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace besynth
