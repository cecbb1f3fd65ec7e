#pragma once

#include <stdexcept>
#include <string>

namespace plantflow {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable name used in CLI error records.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define PLANTFLOW_DEFINE_ERROR(Name)                                      \
    class Name : public Error {                                          \
    public:                                                              \
        using Error::Error;                                              \
        const char* kind() const noexcept override { return #Name; }     \
    }

PLANTFLOW_DEFINE_ERROR(GeometryError);
PLANTFLOW_DEFINE_ERROR(MeshError);
PLANTFLOW_DEFINE_ERROR(CompatibilityError);
PLANTFLOW_DEFINE_ERROR(ParameterError);
PLANTFLOW_DEFINE_ERROR(DomainError);
PLANTFLOW_DEFINE_ERROR(SolveError);
PLANTFLOW_DEFINE_ERROR(StateError);
PLANTFLOW_DEFINE_ERROR(StepError);
PLANTFLOW_DEFINE_ERROR(SchemeError);
PLANTFLOW_DEFINE_ERROR(ValidationError);
PLANTFLOW_DEFINE_ERROR(ParseError);
PLANTFLOW_DEFINE_ERROR(IOError);
PLANTFLOW_DEFINE_ERROR(VerificationError);

#undef PLANTFLOW_DEFINE_ERROR

}  // namespace plantflow
