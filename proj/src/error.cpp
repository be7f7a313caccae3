#include "wcbound/error.hpp"

namespace wcb {

const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::SyntaxError: return "SYNTAX_ERROR";
    case ErrorCode::UnknownIdentifier: return "UNKNOWN_IDENTIFIER";
    case ErrorCode::ArityError: return "ARITY_ERROR";
    case ErrorCode::DomainError: return "DOMAIN_ERROR";
    case ErrorCode::EmptyBox: return "EMPTY_BOX";
    case ErrorCode::DimMismatch: return "DIM_MISMATCH";
    case ErrorCode::BadExpr: return "BAD_EXPR";
    case ErrorCode::EpsOutOfRange: return "EPS_OUT_OF_RANGE";
    case ErrorCode::NonconvexPhi: return "NONCONVEX_PHI";
    case ErrorCode::ParamOutOfRange: return "PARAM_OUT_OF_RANGE";
    case ErrorCode::EpsNotAboveSigma: return "EPS_NOT_ABOVE_SIGMA";
    case ErrorCode::XOutOfRange: return "X_OUT_OF_RANGE";
    case ErrorCode::TauNonpositive: return "TAU_NONPOSITIVE";
    case ErrorCode::SingularA: return "SINGULAR_A";
    case ErrorCode::ZeroLeadingCoeff: return "ZERO_LEADING_COEFF";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

} // namespace wcb
