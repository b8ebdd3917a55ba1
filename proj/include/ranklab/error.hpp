#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ranklab {

enum class ErrorCode {
    invalid_spec,        // malformed or inconsistent construction parameters
    stage_unavailable,   // the spec does not define parameters for a stage
    too_large,           // a result-size or enumeration cap was exceeded
    digit_exhausted,     // an explicit digit list ran out
    left_space,          // backward motion past the bottom of every materialized column
    not_calpha,          // family is outside the class the classifier covers
    insufficient_data,   // not enough blocks to infer an exponent
    unstable_table,      // correlation lags were not stabilized
    cache_corrupt,
    io,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::invalid_spec: return "invalid_spec";
    case ErrorCode::stage_unavailable: return "stage_unavailable";
    case ErrorCode::too_large: return "too_large";
    case ErrorCode::digit_exhausted: return "digit_exhausted";
    case ErrorCode::left_space: return "left_space";
    case ErrorCode::not_calpha: return "not_calpha";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::unstable_table: return "unstable_table";
    case ErrorCode::cache_corrupt: return "cache_corrupt";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

/// Exception carrying a machine-readable code and, where it applies, the
/// stage index the failure refers to.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::uint64_t> stage = std::nullopt)
        : std::runtime_error(what), code_(code), stage_(stage) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::uint64_t> stage() const noexcept { return stage_; }

private:
    ErrorCode code_;
    std::optional<std::uint64_t> stage_;
};

}  // namespace ranklab
