#pragma once

#include <stdexcept>
#include <string>

namespace pfdsim {

/// Bad input: violated precondition, malformed file, unknown identifier.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Newton or step-size control gave up. Carries the simulated time (negative
/// for a DC solve) and the node with the largest residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double time, std::string worst_node)
        : std::runtime_error(what), time_(time), worst_node_(std::move(worst_node)) {}

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] const std::string& worst_node() const noexcept { return worst_node_; }

private:
    double time_;
    std::string worst_node_;
};

/// A measurement could not be taken (e.g. no qualifying transition).
class MeasureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A characterization search could not establish its result.
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pfdsim
