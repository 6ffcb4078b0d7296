#pragma once

#include <stdexcept>
#include <string>

namespace reflecta {

// Input/contract errors. The CLI maps these to exit code 2.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

// ground() called on a binormal direction: every hyperplane through the
// line is a ground hyperplane, so the result is not unique.
struct BinormalDirection : ContractViolation {
    explicit BinormalDirection(const std::string& msg) : ContractViolation(msg) {}
};

// A chain of near-equal eigenvalues spans more than the grouping tolerance
// end to end; the spectrum partition of this instance is ill-posed.
struct AmbiguousGrouping : ContractViolation {
    explicit AmbiguousGrouping(const std::string& msg) : ContractViolation(msg) {}
};

struct TooFewChords : ContractViolation {
    explicit TooFewChords(const std::string& msg) : ContractViolation(msg) {}
};

struct DegeneratePointSet : ContractViolation {
    explicit DegeneratePointSet(const std::string& msg) : ContractViolation(msg) {}
};

// Runtime numerical failures. The CLI maps these to exit code 3.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Sheet matching along a continuation path became ambiguous even after
// step halving; the path passed too close to the non-generic locus.
struct SheetCollision : NumericalFailure {
    explicit SheetCollision(const std::string& msg) : NumericalFailure(msg) {}
};

struct StepTooLarge : NumericalFailure {
    explicit StepTooLarge(const std::string& msg) : NumericalFailure(msg) {}
};

}  // namespace reflecta
