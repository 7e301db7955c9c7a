#pragma once

#include <stdexcept>
#include <string>

namespace fkpp {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FKPP_DEFINE_ERROR(Name)                 \
    struct Name : Error {                       \
        using Error::Error;                     \
    }

// domain
FKPP_DEFINE_ERROR(OverlappingIntervals);
FKPP_DEFINE_ERROR(MissingClassification);
FKPP_DEFINE_ERROR(EmptyMinus);

// kernel
FKPP_DEFINE_ERROR(UnsupportedDimension);
FKPP_DEFINE_ERROR(PointInsideInterval);
FKPP_DEFINE_ERROR(ArgumentsOutsideSupport);

// discretization
FKPP_DEFINE_ERROR(MeshTooCoarse);
FKPP_DEFINE_ERROR(DimensionMismatch);

// eigensolver
FKPP_DEFINE_ERROR(NoConvergence);
FKPP_DEFINE_ERROR(NonPositiveEigenvector);
FKPP_DEFINE_ERROR(GridMismatch);
FKPP_DEFINE_ERROR(ZeroVector);

// steady
FKPP_DEFINE_ERROR(NonMonotoneStep);
FKPP_DEFINE_ERROR(Blowup);
FKPP_DEFINE_ERROR(NotSettled);
FKPP_DEFINE_ERROR(OrderViolation);

// bounds
FKPP_DEFINE_ERROR(NoInteriorSamples);
FKPP_DEFINE_ERROR(InsufficientSamples);

// experiments
FKPP_DEFINE_ERROR(MonotonicityViolation);
FKPP_DEFINE_ERROR(TargetOutOfRange);
FKPP_DEFINE_ERROR(OutcomeMismatch);
FKPP_DEFINE_ERROR(ConfigError);

/// Violated caller-side contract (documented `pre:` clauses).
FKPP_DEFINE_ERROR(PreconditionError);

#undef FKPP_DEFINE_ERROR

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionError(what);
}

}  // namespace fkpp
