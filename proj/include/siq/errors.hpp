#pragma once

#include <stdexcept>
#include <string>

namespace siq {

// Bad input: parameters, fractions, files, configuration. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that could not be completed. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SIQ_DECLARE_ERROR(Name, Base)                                     \
    class Name : public Base {                                            \
    public:                                                               \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
    };

SIQ_DECLARE_ERROR(InvalidParams, ValidationError)
SIQ_DECLARE_ERROR(DelayTooSmall, ValidationError)
SIQ_DECLARE_ERROR(OutOfRange, ValidationError)
SIQ_DECLARE_ERROR(NotInSimplex, ValidationError)
SIQ_DECLARE_ERROR(InvalidFractions, ValidationError)
SIQ_DECLARE_ERROR(SpanTooShort, ValidationError)
SIQ_DECLARE_ERROR(SubcriticalP, ValidationError)
SIQ_DECLARE_ERROR(AlwaysStable, ValidationError)
SIQ_DECLARE_ERROR(EpsNotBelowOne, ValidationError)
SIQ_DECLARE_ERROR(BadDegree, ValidationError)
SIQ_DECLARE_ERROR(FileParse, ValidationError)
SIQ_DECLARE_ERROR(ConfigError, ValidationError)

SIQ_DECLARE_ERROR(NonFiniteState, NumericalError)
SIQ_DECLARE_ERROR(ContourThroughZero, NumericalError)
SIQ_DECLARE_ERROR(HorizonTooShort, NumericalError)

#undef SIQ_DECLARE_ERROR

}  // namespace siq
