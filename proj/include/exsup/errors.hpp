#pragma once

#include <stdexcept>

namespace exsup {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define EXSUP_ERROR(NAME)              \
  struct NAME : Error {                \
    using Error::Error;                \
  };

EXSUP_ERROR(DomainError)            // argument outside the state interval / stored range
EXSUP_ERROR(ParamError)             // invalid model or payoff parameters
EXSUP_ERROR(ConfigError)            // malformed configuration input
EXSUP_ERROR(QuadratureFailure)      // adaptive quadrature did not converge
EXSUP_ERROR(SeriesDivergence)       // series exceeded its term budget
EXSUP_ERROR(ODEFailure)             // ODE integration failed
EXSUP_ERROR(NotSupported)           // requested feature outside scope
EXSUP_ERROR(NoRoot)                 // no sign change found in search interval
EXSUP_ERROR(RootLost)               // continuation lost its root bracket
EXSUP_ERROR(NoPositiveSet)          // payoff nonpositive everywhere: nothing to stop for
EXSUP_ERROR(LimitViolation)         // g/psi does not vanish toward the right boundary
EXSUP_ERROR(MonotonicityFailure)    // a solution that must be monotone is not
EXSUP_ERROR(NonMonotoneCurve)       // traced boundary curve is not monotone
EXSUP_ERROR(MismatchError)          // two independent formulas disagree
EXSUP_ERROR(DegenerateDenominator)  // ratio denominator below tolerance
EXSUP_ERROR(ShapeViolation)         // solved boundaries in the wrong order / region shape
EXSUP_ERROR(NoInteriorRoot)         // neither interior nor corner branch closes
EXSUP_ERROR(BoundaryTermUnknown)    // psi'/S' has no usable limit at an attainable a
EXSUP_ERROR(SchemeError)            // Monte Carlo scheme misconfiguration
EXSUP_ERROR(SimulationError)        // Monte Carlo setup error

#undef EXSUP_ERROR

}  // namespace exsup
