#pragma once

#include <stdexcept>
#include <string>

namespace pcurv {

enum class ErrorCode {
    InvalidArgument,
    SouthPoleSingular,
    NotOnSphere,
    DimensionMismatch,
    ToleranceNotReached,
    NonFiniteIntegrand,
    SingularityDetected,
    DegenerateD,
    UnsupportedOrder,
    FitUnstable,
    ConstantPsi,
    NewtonStall,
    NonMorse,
    InconsistentInput,
    ConfigError
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SouthPoleSingular: return "SouthPoleSingular";
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::SingularityDetected: return "SingularityDetected";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::ConstantPsi: return "ConstantPsi";
    case ErrorCode::NewtonStall: return "NewtonStall";
    case ErrorCode::NonMorse: return "NonMorse";
    case ErrorCode::InconsistentInput: return "InconsistentInput";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace pcurv
