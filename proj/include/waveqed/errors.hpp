#pragma once

#include <stdexcept>
#include <string>

namespace waveqed {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear solve detected rank deficiency (undamped subspace, e.g. all rates zero).
struct SingularSystem : Error {
    using Error::Error;
};

// A transport/amplification coefficient was requested with its Rabi frequency
// (or a rate it divides by) equal to zero.
struct UndefinedCoefficient : Error {
    using Error::Error;
};

// Ladder systems cannot amplify; eta_c / eta_inc are not defined for them.
struct UnsupportedTopology : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

// phase(chi) at the simultaneous zero of 2 Re chi and 1 - 2 Im chi.
struct UndefinedPhase : Error {
    using Error::Error;
};

// Kramers-Kronig input does not decay enough toward the grid ends.
struct GridTooNarrow : Error {
    using Error::Error;
};

// |t| <= floor on the KK grid while flooring is not authorized.
struct NonPositiveAmplitude : Error {
    using Error::Error;
};

struct InvalidScenario : Error {
    using Error::Error;
};

} // namespace waveqed
