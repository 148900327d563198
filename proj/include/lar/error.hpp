#pragma once

#include <stdexcept>
#include <string>

namespace lar {

enum class ErrorCode {
    InvalidArgument,
    ZeroVector,
    EqualLabels,
    DegenerateBatch,
    BadK,
    NonFinite,
    DimensionError,
    BadEpsilon,
    RangeAliased,
    WrongFrameCount,
    ChannelMismatch,
    InsufficientLabelSamples,
    ShapeMismatch,
    NonFiniteLoss,
    EmptySplit,
    BadAlpha,
    Io,
    Parse,
    Dataset,
    Usage,
    VerificationFailed,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the
// C API translates them to status values without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lar
