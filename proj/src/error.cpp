#include "kmncs/error.hpp"

namespace kmncs {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
        case ErrorCode::SingleClassData: return "SingleClassData";
        case ErrorCode::InvalidSize: return "InvalidSize";
        case ErrorCode::InvalidFactor: return "InvalidFactor";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::TooManyFolds: return "TooManyFolds";
        case ErrorCode::SeriesFailure: return "SeriesFailure";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace kmncs
