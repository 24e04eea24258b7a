#pragma once

#include <stdexcept>
#include <string>

namespace renoise {

enum class ErrorKind {
    NonFiniteSample,
    DomainEscape,
    RangeEscape,
    NotRenormalizable,
    NewtonDiverged,
    SingularJacobian,
    CrossCheckFailed,
    NonMonotone,
    BracketLost,
    PositivityViolated,
    NotConverged,
    NegativeEigenfunction,
    ReconstructionMismatch,
    AllSamplesGuarded,
    DegenerateVariance,
    MissingRho,
    MissingManifest,
    Config,
};

const char* kind_name(ErrorKind k);

/// Every numerical failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace renoise
