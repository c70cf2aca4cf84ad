#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdtest {

enum class ErrorCode {
    TooFewObservations,
    NonFiniteData,
    DimensionMismatch,
    EigenFailure,
    DegenerateEigenvalue,
    DegenerateDiagonal,
    NonPositiveVariance,
    OracleRequired,
    BadDimension,
    BadFamilyParams,
    BadArgument,
    ParseError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::DegenerateDiagonal: return "DegenerateDiagonal";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::OracleRequired: return "OracleRequired";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::BadFamilyParams: return "BadFamilyParams";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

inline void require(bool cond, ErrorCode code, const std::string& detail) {
    if (!cond) fail(code, detail);
}

}  // namespace hdtest
