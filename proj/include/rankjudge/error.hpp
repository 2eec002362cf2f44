#pragma once

#include <stdexcept>
#include <string>

namespace rankjudge {

// Base of every error raised by the library. Subclasses let callers (and the
// CLI exit-code mapping) tell malformed input apart from degenerate data.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (shape, finiteness, range).
class validation_error : public error {
public:
    using error::error;
};

// A named algorithm or pair is not part of the matrix.
class lookup_error : public error {
public:
    using error::error;
};

// Argument outside the mathematical domain of a kernel (p outside (0,1), ...).
class domain_error : public error {
public:
    using error::error;
};

// Data carries no information for the requested test (e.g. all differences zero).
class degenerate_data_error : public error {
public:
    using error::error;
};

// Text input could not be parsed. Message carries row/column location.
class parse_error : public error {
public:
    using error::error;
};

} // namespace rankjudge
