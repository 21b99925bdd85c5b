#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace softgrip {

/// Stable error codes shared by the library and the CLI error stream.
enum class ErrorCode {
    OutOfRange,      // scalar input outside its admissible interval
    InvalidParams,   // parameter set violates a model invariant
    InvalidIndex,    // finger index outside {1, 2, 3}
    ParseError,      // malformed file or JSON input
    ValidationError, // structurally valid input that breaks a data invariant
    OutOfHull,       // calibration query outside the measured knot rectangle
    DegenerateInput, // input that would divide by ~0
    NoClosure,       // fingers cannot close onto the object
    NotMonotone,     // aperture pre-check failed over the searched range
    Internal,        // invariant-guarded path that cannot normally be reached
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidIndex: return "InvalidIndex";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::OutOfHull: return "OutOfHull";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::NoClosure: return "NoClosure";
        case ErrorCode::NotMonotone: return "NotMonotone";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace softgrip
