#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

// Base class for all library errors. Subclasses carry the invariant name in
// the what() string so CLI output and tests can name the failing condition.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define TORSIONLAB_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                                    \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}   \
    }

// numlin
TORSIONLAB_DEFINE_ERROR(DimensionMismatch);
TORSIONLAB_DEFINE_ERROR(SpanMismatch);
TORSIONLAB_DEFINE_ERROR(NotOrthonormal);
TORSIONLAB_DEFINE_ERROR(NotHermitian);

// simplicial
TORSIONLAB_DEFINE_ERROR(MissingFace);
TORSIONLAB_DEFINE_ERROR(DuplicateSimplex);
TORSIONLAB_DEFINE_ERROR(MalformedDocument);
TORSIONLAB_DEFINE_ERROR(DegreeOutOfRange);
TORSIONLAB_DEFINE_ERROR(NotSubcomplex);
TORSIONLAB_DEFINE_ERROR(CoverageGap);

// localsys
TORSIONLAB_DEFINE_ERROR(MissingEdge);
TORSIONLAB_DEFINE_ERROR(InvalidSystem);
TORSIONLAB_DEFINE_ERROR(WrongDimension);
TORSIONLAB_DEFINE_ERROR(NotClosedCycle);

// hilbcx
TORSIONLAB_DEFINE_ERROR(ExactnessFailure);
TORSIONLAB_DEFINE_ERROR(ZigZagBreakdown);
TORSIONLAB_DEFINE_ERROR(InfeasibleProfile);

// detline
TORSIONLAB_DEFINE_ERROR(NonIntegerSign);
TORSIONLAB_DEFINE_ERROR(NotIsomorphism);
TORSIONLAB_DEFINE_ERROR(BasisMismatch);
TORSIONLAB_DEFINE_ERROR(DegreeMismatch);

// gluelab
TORSIONLAB_DEFINE_ERROR(DegenerateHolonomy);

// gauge
TORSIONLAB_DEFINE_ERROR(StepTooLarge);
TORSIONLAB_DEFINE_ERROR(ShapeMismatch);
TORSIONLAB_DEFINE_ERROR(NotFlatInput);

// cli
TORSIONLAB_DEFINE_ERROR(IoFailure);

#undef TORSIONLAB_DEFINE_ERROR

}  // namespace torsionlab
