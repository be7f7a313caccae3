#pragma once

#include <stdexcept>
#include <string>

namespace wcb {

// Every failure mode exposed by the library maps to one of these codes.
// CLI maps SyntaxError/UnknownIdentifier/ArityError/Usage to exit code 2,
// everything else to exit code 1.
enum class ErrorCode {
    // parsing
    SyntaxError,
    UnknownIdentifier,
    ArityError,
    // evaluation
    DomainError,
    // model validation
    EmptyBox,
    DimMismatch,
    BadExpr,
    // inequality evaluators
    EpsOutOfRange,
    NonconvexPhi,
    ParamOutOfRange,
    EpsNotAboveSigma,
    XOutOfRange,
    TauNonpositive,
    SingularA,
    ZeroLeadingCoeff,
    // oracle guards
    TooLarge,
    // should-not-happen
    Internal
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, long offset = -1)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code), offset_(offset) {}

    ErrorCode code() const { return code_; }
    // Byte offset into the source text for parse errors, -1 otherwise.
    long offset() const { return offset_; }

private:
    ErrorCode code_;
    long offset_;
};

} // namespace wcb
