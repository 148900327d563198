#include "lar/smoothing.hpp"

#include <cmath>
#include <string>

#include "lar/error.hpp"

namespace lar {

SmoothingState::SmoothingState(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::BadAlpha, "smoothing alpha " + std::to_string(alpha) + " outside (0, 1]");
    }
}

double SmoothingState::update(double x) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "smoothing input is not finite");
    if (!initialized_) {
        carry_ = x;
        initialized_ = true;
        return x;
    }
    carry_ = alpha_ * x + (1.0 - alpha_) * carry_;
    return carry_;
}

}  // namespace lar
