#pragma once

#include <stdexcept>
#include <string>

namespace ltx {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define LTX_ERROR(Name)                                                 \
    struct Name : Error {                                               \
        explicit Name(const std::string& w = "") : Error(#Name, w) {}   \
    }

// invalid input (CLI exit 2)
LTX_ERROR(InvalidInput);
LTX_ERROR(DimensionMismatch);
LTX_ERROR(NonInvertibleU);
LTX_ERROR(ConstantTermNonzero);
LTX_ERROR(SingularLinearPart);
LTX_ERROR(ConvergenceViolation);
LTX_ERROR(ThresholdViolation);
LTX_ERROR(NonUnitDeterminant);
LTX_ERROR(NotInvertibleModP);
LTX_ERROR(InfiniteModule);
LTX_ERROR(IncompatibleResidueDegree);
LTX_ERROR(MissingGaussSum);
LTX_ERROR(TraceNotOne);
LTX_ERROR(HypothesisFViolated);
LTX_ERROR(HypothesisViolated);

// resource limits (CLI exit 3)
LTX_ERROR(PrecisionExhausted);
LTX_ERROR(DegreeBudgetExceeded);
LTX_ERROR(TailTooWeak);

// findings that signal a broken identity (CLI exit 1)
LTX_ERROR(IntegralityFailure);
LTX_ERROR(InconsistentConductorData);
LTX_ERROR(ConjugatorNotRational);
LTX_ERROR(RandomnessExhausted);

#undef LTX_ERROR

}  // namespace ltx
