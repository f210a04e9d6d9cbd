#pragma once

#include <stdexcept>
#include <string>

namespace liqspread {

/// Malformed, inconsistent or out-of-domain input (files, parameters, contracts).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed: no bracketed root, non-finite state, divergence.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace liqspread
