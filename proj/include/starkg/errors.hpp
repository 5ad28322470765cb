#pragma once

#include <stdexcept>
#include <string>

namespace starkg {

/// Base class for every recoverable error raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

#define STARKG_ERROR_TYPE(NAME)                       \
  struct NAME : Error {                               \
    explicit NAME(const std::string& what_arg)        \
        : Error(std::string(#NAME) + ": " + what_arg) {} \
  };

// network construction
STARKG_ERROR_TYPE(TooFewBranches)
STARKG_ERROR_TYPE(NonPositiveSpeed)
STARKG_ERROR_TYPE(UnsortedPotentials)
STARKG_ERROR_TYPE(UnknownBranch)
STARKG_ERROR_TYPE(OutsideDomain)

// function handling
STARKG_ERROR_TYPE(NonIntegrable)
STARKG_ERROR_TYPE(MissingDerivativeRule)
STARKG_ERROR_TYPE(NonCompactSupport)

// spectral quantities
STARKG_ERROR_TYPE(ThresholdSingularity)
STARKG_ERROR_TYPE(WronskianZero)
STARKG_ERROR_TYPE(SpectrumPoint)
STARKG_ERROR_TYPE(SingularD)

// evolution
STARKG_ERROR_TYPE(BandOutsideGap)
STARKG_ERROR_TYPE(AmplitudeUnderflow)

// discrete oracle
STARKG_ERROR_TYPE(BadGrid)
STARKG_ERROR_TYPE(SingularSystem)
STARKG_ERROR_TYPE(BoundaryContamination)

// numerics
STARKG_ERROR_TYPE(ToleranceNotMet)

// cli
STARKG_ERROR_TYPE(ConfigError)
STARKG_ERROR_TYPE(CheckFailure)

#undef STARKG_ERROR_TYPE

}  // namespace starkg
