#pragma once

#include <stdexcept>
#include <string>

namespace greens {

/// Base class for numerical failures. `operation()` names the routine that
/// gave up; the CLI maps every subclass to exit status 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}

    const std::string& operation() const noexcept { return operation_; }
    virtual const char* kind() const noexcept { return "NumericalError"; }

private:
    std::string operation_;
};

#define GREENS_DEFINE_ERROR(Name)                                              \
    class Name : public NumericalError {                                       \
    public:                                                                    \
        using NumericalError::NumericalError;                                  \
        const char* kind() const noexcept override { return #Name; }           \
    };

GREENS_DEFINE_ERROR(NearEigenvalue)
GREENS_DEFINE_ERROR(TailNotConverged)
GREENS_DEFINE_ERROR(ShootingDivergence)
GREENS_DEFINE_ERROR(NodeEncountered)
GREENS_DEFINE_ERROR(StepSizeUnderflow)
GREENS_DEFINE_ERROR(ContourNearPole)
GREENS_DEFINE_ERROR(NonConvergence)
GREENS_DEFINE_ERROR(RankDeficient)
GREENS_DEFINE_ERROR(BranchPointHit)

#undef GREENS_DEFINE_ERROR

/// Precondition violations on arguments (K0 at 0, |x| > 1 for P_l, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace greens
