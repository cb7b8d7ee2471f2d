#pragma once

#include <stdexcept>
#include <string>

namespace triwave {

/// Invalid configuration (bad grid spec, parameter out of range, missing
/// table entry, malformed config file).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable or mismatched external data (field files, potentials).
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Degenerate state reached while solving (zero-mass component, undefined
/// multiplier).
struct solve_error : std::runtime_error {
    explicit solve_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two results that cannot be compared (different grids or parameters).
struct comparison_error : std::runtime_error {
    explicit comparison_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operation called on a discretization that does not support it.
struct unsupported_error : std::logic_error {
    explicit unsupported_error(const std::string& msg) : std::logic_error(msg) {}
};

/// API misuse (oracle invoked outside its regime).
struct misuse_error : std::logic_error {
    explicit misuse_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace triwave
