#pragma once

#include <stdexcept>
#include <string>

namespace kmncs {

enum class ErrorCode {
    InvalidArgument,
    InvalidParams,
    DimensionMismatch,
    NonConvergence,
    SizeLimitExceeded,
    SingleClassData,
    InvalidSize,
    InvalidFactor,
    DegenerateSplit,
    TooManyFolds,
    SeriesFailure,
    IoError,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace kmncs
