#pragma once

#include <stdexcept>
#include <string>

namespace galrep {

// Base class for all failures raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GALREP_ERROR(Name)                                        \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg = #Name) : Error(msg) {} \
    }

GALREP_ERROR(NotSimpleRoot);
GALREP_ERROR(NoSmallFraction);
GALREP_ERROR(NotInSubgroup);
GALREP_ERROR(PrecisionLoss);
GALREP_ERROR(NonUnitDenominator);
GALREP_ERROR(SingularCurve);
GALREP_ERROR(NotTorsion);
GALREP_ERROR(DegenerateConfiguration);
GALREP_ERROR(DivisionByZeroRoot);
GALREP_ERROR(NoCurveFound);
GALREP_ERROR(PrimitivityExhausted);
GALREP_ERROR(RankDeficient);
GALREP_ERROR(PrecisionTooLow);
GALREP_ERROR(NonIntegralResult);
GALREP_ERROR(FewCusps);
GALREP_ERROR(DegenerateDraw);
GALREP_ERROR(StuckGeneration);
GALREP_ERROR(InsufficientCusps);
GALREP_ERROR(UnexpectedDimension);
GALREP_ERROR(IndeterminateCoefficient);
GALREP_ERROR(NotDefined);
GALREP_ERROR(UnsupportedWeight);
GALREP_ERROR(NoAdmissiblePrime);
GALREP_ERROR(ReconstructionFailed);
GALREP_ERROR(VerificationMismatch);

#undef GALREP_ERROR

inline void check(bool cond, const char* msg) {
    if (!cond) throw Error(msg);
}

}  // namespace galrep
