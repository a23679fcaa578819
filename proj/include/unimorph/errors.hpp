#pragma once

#include <stdexcept>
#include <string>

namespace unimorph {

/// A request that is well-formed but outside the experimental protocol
/// (loads past the fracture threshold, over-limit currents, ...).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown inside a simulation (non-finite state).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace unimorph
