/// @file errors.hpp
/// @brief Error taxonomy shared by all modules.
///
/// Conventions:
///  - ContractError       caller broke an operation's stated precondition
///                        (mismatched grids, negative density, bad sizes);
///  - ConvergenceError    an iterative solver ran out of its iteration
///                        budget; carries the residual it reached;
///  - CompatibilityError  Neumann solve with a right-hand side outside the
///                        operator's range;
///  - ConfigError         bad run configuration; carries key and line;
///  - IoError             file-system failures and malformed files;
///  - InternalError       an invariant the scheme guarantees by construction
///                        was observed broken; a bug, never user input.

#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ehd {

struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceError : std::runtime_error {
    double achieved = std::numeric_limits<double>::quiet_NaN();
    double target = std::numeric_limits<double>::quiet_NaN();
    long iterations = 0;
    ConvergenceError(const std::string& what_arg, double achieved_, double target_, long iters)
        : std::runtime_error(what_arg + " (residual " + std::to_string(achieved_) + " vs tolerance "
                             + std::to_string(target_) + " after " + std::to_string(iters) + " iterations)"),
          achieved(achieved_), target(target_), iterations(iters) {}

    /// Rewrap tag: keeps `what_arg` verbatim (no residual suffix appended),
    /// for layers that add context to an already-formatted message.
    struct already_formatted {};
    ConvergenceError(already_formatted, const std::string& what_arg, double achieved_,
                     double target_, long iters)
        : std::runtime_error(what_arg), achieved(achieved_), target(target_), iterations(iters) {}
};

struct CompatibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    std::string key;
    int line = 0;
    ConfigError(const std::string& msg, std::string key_ = {}, int line_ = 0)
        : std::runtime_error(line_ > 0 ? msg + " (key '" + key_ + "', line " + std::to_string(line_) + ")"
                             : (key_.empty() ? msg : msg + " (key '" + key_ + "')")),
          key(std::move(key_)), line(line_) {}
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace ehd
