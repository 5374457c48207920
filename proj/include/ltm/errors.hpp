#pragma once
#include <stdexcept>
#include <string>

namespace ltm {

enum class ErrorCode {
    InvalidTimestamp,
    DegenerateEmbedding,
    DimensionMismatch,
    EmptyCandidateSet,
    SchemaViolation,
    IngestError,
    InvalidRange,
    MissingMarketData,
    DuplicateReflection,
    NoActivity,
    InsufficientHistory,
    CoreUnavailable,
    IoError,
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
        case ErrorCode::DegenerateEmbedding: return "DegenerateEmbedding";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::IngestError: return "IngestError";
        case ErrorCode::InvalidRange: return "InvalidRange";
        case ErrorCode::MissingMarketData: return "MissingMarketData";
        case ErrorCode::DuplicateReflection: return "DuplicateReflection";
        case ErrorCode::NoActivity: return "NoActivity";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::CoreUnavailable: return "CoreUnavailable";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace ltm
