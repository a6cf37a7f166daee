#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pueval {

enum class ErrorCode {
    EmptyInput,
    InvalidScore,
    EmptySet,
    RankOutOfRange,
    NoNegatives,
    InsufficientPositives,
    InsufficientNegatives,
    InvalidLevel,
    InfeasibleBeta,
    InternalInconsistency,
    DegenerateCurve,
    IncomparableModels,
    InvalidConfig,
    OracleTooLarge,
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidScore: return "InvalidScore";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::NoNegatives: return "NoNegatives";
    case ErrorCode::InsufficientPositives: return "InsufficientPositives";
    case ErrorCode::InsufficientNegatives: return "InsufficientNegatives";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::InfeasibleBeta: return "InfeasibleBeta";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::IncomparableModels: return "IncomparableModels";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `code()` is stable and is what the
/// CLI maps onto exit codes; `index()` carries the offending input position
/// where one exists (e.g. the example with a non-finite score).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) throw Error(code, message);
}

} // namespace detail

} // namespace pueval
