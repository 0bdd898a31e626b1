// Error taxonomy. Every failure mode that callers are expected to branch on
// gets its own type; all derive from Error so the CLI can map them to exit
// codes uniformly.

#pragma once

#include <stdexcept>
#include <string>

namespace adel {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural problems with inputs.
struct DimensionMismatch : Error { using Error::Error; };

// Solver-level failures.
struct SingularSolve : Error { using Error::Error; };
struct NonUniqueSteadyState : Error { using Error::Error; };
struct NotRelaxing : Error { using Error::Error; };

// Model-assumption violations.
struct AssumptionViolated : Error { using Error::Error; };
struct NonRealConstant : Error { using Error::Error; };
struct GaugeUnavailable : Error { using Error::Error; };
struct RankDeficientSteadyState : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct NegativeRate : Error { using Error::Error; };
struct TauSearchFailed : Error { using Error::Error; };

// Application-specific.
struct ZeroDetuning : Error { using Error::Error; };
struct SingularDenominator : Error { using Error::Error; };

// Verification-specific.
struct DimensionCap : Error { using Error::Error; };
struct OrderUnavailable : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };

// CLI / configuration.
struct ConfigError : Error { using Error::Error; };

} // namespace adel
