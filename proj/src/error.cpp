#include "lar/error.hpp"

namespace lar {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::EqualLabels: return "EqualLabels";
        case ErrorCode::DegenerateBatch: return "DegenerateBatch";
        case ErrorCode::BadK: return "BadK";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::BadEpsilon: return "BadEpsilon";
        case ErrorCode::RangeAliased: return "RangeAliased";
        case ErrorCode::WrongFrameCount: return "WrongFrameCount";
        case ErrorCode::ChannelMismatch: return "ChannelMismatch";
        case ErrorCode::InsufficientLabelSamples: return "InsufficientLabelSamples";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::EmptySplit: return "EmptySplit";
        case ErrorCode::BadAlpha: return "BadAlpha";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::Dataset: return "Dataset";
        case ErrorCode::Usage: return "Usage";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
    }
    return "Unknown";
}

}  // namespace lar
