#pragma once

#include <stdexcept>
#include <string>

namespace quadtune {

// Base for anything that should abort a run with a nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration file / parameter validation problems (exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Hard faults raised while stepping the simulation (exit code 3).
struct SimulationFault : Error {
    using Error::Error;
};

// Pitch too close to +-pi/2: the Euler-rate map is not invertible there.
struct SingularAttitude : SimulationFault {
    using SimulationFault::SimulationFault;
};

// NaN or infinity appeared in the integrated state.
struct NonFiniteState : SimulationFault {
    using SimulationFault::SimulationFault;
};

// Shape disagreement between tensors, layers or files.
struct DimensionMismatch : Error {
    using Error::Error;
};

// Activation tag that the network format does not define.
struct UnsupportedActivation : Error {
    using Error::Error;
};

// Replay buffer asked for a larger batch than it holds.
struct InsufficientExperience : Error {
    using Error::Error;
};

// Metrics requested on a trace with no rows.
struct EmptyTrace : Error {
    using Error::Error;
};

// Comparing traces that were not flown on the same mission grid.
struct MissionMismatch : Error {
    using Error::Error;
};

} // namespace quadtune
