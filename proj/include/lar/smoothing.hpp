#pragma once

namespace lar {

/// First-order exponential smoothing, x_s[k] = alpha x[k] + (1 - alpha) x_s[k-1].
/// The first sample passes through unchanged and seeds the carry.
class SmoothingState {
public:
    /// Throws BadAlpha unless alpha is in (0, 1].
    explicit SmoothingState(double alpha = 0.3);

    /// Consumes one sample and returns the smoothed value.
    double update(double x);
    void reset() { initialized_ = false; carry_ = 0.0; }

    double alpha() const { return alpha_; }
    double carry() const { return carry_; }
    bool initialized() const { return initialized_; }

private:
    double alpha_;
    double carry_ = 0.0;
    bool initialized_ = false;
};

}  // namespace lar
