#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace errband {

enum class ErrorCode {
    unsupported_horizon,
    empty_error_set,
    invalid_error_value,
    invalid_observation,
    insufficient_history,
    method_mismatch,
    inverted_interval,
    incomplete_level_set,
    no_observations,
    insufficient_quarterly_history,
    degenerate_regressor,
    expected_seven_quarters,
    schema_mismatch,
    duplicate_record,
    truth_unavailable,
    invalid_level,
    invalid_argument,
    io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::unsupported_horizon: return "unsupported horizon";
    case ErrorCode::empty_error_set: return "empty error set";
    case ErrorCode::invalid_error_value: return "invalid error value";
    case ErrorCode::invalid_observation: return "invalid observation";
    case ErrorCode::insufficient_history: return "insufficient history";
    case ErrorCode::method_mismatch: return "error-method mismatch";
    case ErrorCode::inverted_interval: return "inverted interval";
    case ErrorCode::incomplete_level_set: return "incomplete level set";
    case ErrorCode::no_observations: return "no observations";
    case ErrorCode::insufficient_quarterly_history: return "insufficient quarterly history";
    case ErrorCode::degenerate_regressor: return "degenerate regressor";
    case ErrorCode::expected_seven_quarters: return "expected seven quarters";
    case ErrorCode::schema_mismatch: return "schema mismatch";
    case ErrorCode::duplicate_record: return "duplicate record";
    case ErrorCode::truth_unavailable: return "truth unavailable";
    case ErrorCode::invalid_level: return "invalid level";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::io: return "i/o error";
    }
    return "unknown error";
}

/// Base exception for every failure raised by the library. The message
/// always starts with the canonical text of the error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string_view detail = {})
        : std::runtime_error(compose(code, detail)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    static std::string compose(ErrorCode code, std::string_view detail) {
        std::string msg(to_string(code));
        if (!detail.empty()) {
            msg += ": ";
            msg += detail;
        }
        return msg;
    }

    ErrorCode code_;
};

/// Raised when fewer than the requested number of past errors are eligible.
class InsufficientHistory : public Error {
public:
    InsufficientHistory(std::size_t found, std::size_t required, std::string_view detail = {})
        : Error(ErrorCode::insufficient_history,
                "found " + std::to_string(found) + " of " + std::to_string(required) +
                    (detail.empty() ? std::string{} : " (" + std::string(detail) + ")")),
          found_(found), required_(required) {}

    std::size_t found() const noexcept { return found_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t found_;
    std::size_t required_;
};

} // namespace errband
