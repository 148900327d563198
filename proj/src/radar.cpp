#include "lar/radar.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include <fftw3.h>

#include "lar/error.hpp"

namespace lar::radar {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Plans are created once per shape under a lock; fftw_execute_dft on a plan is
// thread-safe with caller-owned arrays.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [shape, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan forward(int rows, int cols) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({rows, cols});
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(rows * cols));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(std::make_pair(rows, cols), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void RadarConfig::validate() const {
    if (!is_power_of_two(n_samples) || !is_power_of_two(n_chirps)) {
        throw Error(ErrorCode::InvalidArgument, "n_samples and n_chirps must be powers of two");
    }
    if (n_samples < 2 || n_chirps < 2) {
        throw Error(ErrorCode::InvalidArgument, "n_samples and n_chirps must be >= 2");
    }
    if (n_antennas < 1) throw Error(ErrorCode::InvalidArgument, "n_antennas must be >= 1");
    if (!(bandwidth > 0.0) || !(chirp_duration > 0.0) || !(carrier_frequency > 0.0) || !(frame_rate > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bandwidth, chirp_duration, carrier_frequency, frame_rate must be > 0");
    }
    if (n_chirps * chirp_duration > 1.0 / frame_rate) {
        throw Error(ErrorCode::InvalidArgument, "chirps of one frame exceed the frame period");
    }
}

RawFrame synth_frame(const TargetScene& scene, const RadarConfig& config, long frame_index, double noise_sigma,
                     std::uint64_t seed) {
    config.validate();
    if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");

    RawFrame frame(config.n_antennas, config.n_samples, config.n_chirps);
    for (double& v : frame.data) v = config.leakage;

    const double frame_time = static_cast<double>(frame_index) / config.frame_rate;
    const double max_range = config.max_range();
    const double tone_scale = 2.0 * config.bandwidth / (kSpeedOfLight * config.chirp_duration);
    const double sample_period = config.chirp_duration / config.n_samples;

    for (std::size_t t = 0; t < scene.targets.size(); ++t) {
        const Target& target = scene.targets[t];
        const double antenna_step = kPi * std::sin(target.angle);
        for (int k = 0; k < config.n_chirps; ++k) {
            const double time = frame_time + k * config.chirp_duration;
            const double r = target.range + target.radial_velocity * time +
                             target.micro_motion_amplitude *
                                 std::sin(2.0 * kPi * target.micro_motion_frequency * time + target.micro_motion_phase);
            if (!(r >= 0.0 && r < max_range)) {
                throw Error(ErrorCode::RangeAliased, "target " + std::to_string(t) + " at range " +
                                                         std::to_string(r) + " m outside [0, " +
                                                         std::to_string(max_range) + ")");
            }
            const double tone = 2.0 * kPi * tone_scale * r * sample_period;
            const double carrier = 4.0 * kPi * config.carrier_frequency * r / kSpeedOfLight;
            for (int a = 0; a < config.n_antennas; ++a) {
                const double phase = carrier + a * antenna_step;
                for (int s = 0; s < config.n_samples; ++s) {
                    frame.at(a, s, k) += target.amplitude * std::cos(tone * s + phase);
                }
            }
        }
    }

    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        for (double& v : frame.data) v += gauss(rng);
    }
    return frame;
}

RawFrame mti_filter(const RawFrame& frame) {
    RawFrame out = frame;
    for (int a = 0; a < frame.antennas; ++a) {
        for (int s = 0; s < frame.samples; ++s) {
            double mean = 0.0;
            for (int c = 0; c < frame.chirps; ++c) mean += frame.at(a, s, c);
            mean /= frame.chirps;
            for (int c = 0; c < frame.chirps; ++c) out.at(a, s, c) = frame.at(a, s, c) - mean;
        }
    }
    return out;
}

RawFrame slow_time_dataframe(std::span<const RawFrame> frames) {
    if (frames.empty()) throw Error(ErrorCode::WrongFrameCount, "slow-time dataframe needs frames");
    const RawFrame& first = frames.front();
    if (static_cast<int>(frames.size()) != first.chirps) {
        throw Error(ErrorCode::WrongFrameCount, "slow-time dataframe needs " + std::to_string(first.chirps) +
                                                    " frames, got " + std::to_string(frames.size()));
    }
    RawFrame out(first.antennas, first.samples, first.chirps);
    for (int col = 0; col < first.chirps; ++col) {
        const RawFrame& f = frames[static_cast<std::size_t>(col)];
        if (f.antennas != first.antennas || f.samples != first.samples || f.chirps != first.chirps) {
            throw Error(ErrorCode::ShapeMismatch, "slow-time frames differ in shape");
        }
        for (int a = 0; a < f.antennas; ++a) {
            for (int s = 0; s < f.samples; ++s) {
                double sum = 0.0;
                for (int c = 0; c < f.chirps; ++c) sum += f.at(a, s, c);
                out.at(a, s, col) = sum;
            }
        }
    }
    return out;
}

std::vector<double> hamming(int n) {
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (n == 1) return w;
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
    return w;
}

std::vector<double> windowed(const RawFrame& frame, int antenna) {
    const auto ws = hamming(frame.samples);
    const auto wc = hamming(frame.chirps);
    std::vector<double> out(static_cast<std::size_t>(frame.samples * frame.chirps));
    for (int s = 0; s < frame.samples; ++s) {
        for (int c = 0; c < frame.chirps; ++c) {
            out[static_cast<std::size_t>(s * frame.chirps + c)] =
                frame.at(antenna, s, c) * ws[static_cast<std::size_t>(s)] * wc[static_cast<std::size_t>(c)];
        }
    }
    return out;
}

ComplexImage full_spectrum(const RawFrame& frame, int antenna) {
    if (antenna < 0 || antenna >= frame.antennas) {
        throw Error(ErrorCode::InvalidArgument, "antenna index out of range");
    }
    const auto w = windowed(frame, antenna);
    ComplexImage img(frame.samples, frame.chirps);
    for (std::size_t i = 0; i < w.size(); ++i) img.data[i] = w[i];
    auto* buf = reinterpret_cast<fftw_complex*>(img.data.data());
    fftw_execute_dft(plan_cache().forward(frame.samples, frame.chirps), buf, buf);
    return img;
}

std::vector<ComplexImage> range_doppler(const RawFrame& frame) {
    std::vector<ComplexImage> images;
    const int range_bins = frame.samples / 2;
    const int half = frame.chirps / 2;
    for (int a = 0; a < frame.antennas; ++a) {
        const ComplexImage spectrum = full_spectrum(frame, a);
        ComplexImage rdi(range_bins, frame.chirps);
        for (int r = 0; r < range_bins; ++r) {
            for (int c = 0; c < frame.chirps; ++c) {
                rdi.at(r, (c + half) % frame.chirps) = spectrum.at(r, c);
            }
        }
        images.push_back(std::move(rdi));
    }
    return images;
}

Tensor3 to_network_input(std::span<const ComplexImage> images, int expected_antennas) {
    if (static_cast<int>(images.size()) != expected_antennas) {
        throw Error(ErrorCode::ChannelMismatch, "expected " + std::to_string(expected_antennas) +
                                                    " antenna images, got " + std::to_string(images.size()));
    }
    const int h = images.front().rows;
    const int w = images.front().cols;
    Tensor3 t(2 * expected_antennas, h, w);
    for (int a = 0; a < expected_antennas; ++a) {
        const ComplexImage& img = images[static_cast<std::size_t>(a)];
        if (img.rows != h || img.cols != w) throw Error(ErrorCode::ShapeMismatch, "antenna images differ in shape");
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                t.at(2 * a, r, c) = img.at(r, c).real();
                t.at(2 * a + 1, r, c) = img.at(r, c).imag();
            }
        }
    }
    return t;
}

ChannelStatsAccumulator::ChannelStatsAccumulator(int channels)
    : sum_(static_cast<std::size_t>(channels), 0.0),
      sum_sq_(static_cast<std::size_t>(channels), 0.0),
      count_(static_cast<std::size_t>(channels), 0.0) {}

void ChannelStatsAccumulator::add(const Tensor3& t) {
    if (static_cast<std::size_t>(t.channels) != sum_.size()) throw Error(ErrorCode::ChannelMismatch, "channel count");
    const int plane = t.height * t.width;
    for (int c = 0; c < t.channels; ++c) {
        for (int i = 0; i < plane; ++i) {
            const double v = t.data[static_cast<std::size_t>(c * plane + i)];
            sum_[static_cast<std::size_t>(c)] += v;
            sum_sq_[static_cast<std::size_t>(c)] += v * v;
        }
        count_[static_cast<std::size_t>(c)] += plane;
    }
}

void ChannelStatsAccumulator::add(std::span<const float> chw, int channels, int plane) {
    if (static_cast<std::size_t>(channels) != sum_.size()) throw Error(ErrorCode::ChannelMismatch, "channel count");
    for (int c = 0; c < channels; ++c) {
        for (int i = 0; i < plane; ++i) {
            const double v = chw[static_cast<std::size_t>(c * plane + i)];
            sum_[static_cast<std::size_t>(c)] += v;
            sum_sq_[static_cast<std::size_t>(c)] += v * v;
        }
        count_[static_cast<std::size_t>(c)] += plane;
    }
}

ChannelStats ChannelStatsAccumulator::finish() const {
    ChannelStats s;
    for (std::size_t c = 0; c < sum_.size(); ++c) {
        if (count_[c] == 0.0) throw Error(ErrorCode::EmptySplit, "no data for channel statistics");
        const double mean = sum_[c] / count_[c];
        const double var = std::max(sum_sq_[c] / count_[c] - mean * mean, 0.0);
        s.mean.push_back(mean);
        s.stddev.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
    }
    return s;
}

void standardize(Tensor3& t, const ChannelStats& stats) {
    if (static_cast<std::size_t>(t.channels) != stats.mean.size()) {
        throw Error(ErrorCode::ChannelMismatch, "channel statistics do not match tensor");
    }
    const int plane = t.height * t.width;
    for (int c = 0; c < t.channels; ++c) {
        for (int i = 0; i < plane; ++i) {
            double& v = t.data[static_cast<std::size_t>(c * plane + i)];
            v = (v - stats.mean[static_cast<std::size_t>(c)]) / stats.stddev[static_cast<std::size_t>(c)];
        }
    }
}

void standardize(std::span<float> chw, const ChannelStats& stats, int plane) {
    const std::size_t channels = stats.mean.size();
    if (chw.size() != channels * static_cast<std::size_t>(plane)) {
        throw Error(ErrorCode::ChannelMismatch, "channel statistics do not match tensor");
    }
    for (std::size_t c = 0; c < channels; ++c) {
        for (int i = 0; i < plane; ++i) {
            float& v = chw[c * static_cast<std::size_t>(plane) + static_cast<std::size_t>(i)];
            v = static_cast<float>((v - stats.mean[c]) / stats.stddev[c]);
        }
    }
}

RangeDopplerTensor preprocess(const RawFrame& frame, int expected_antennas) {
    RangeDopplerTensor out;
    out.fast_time_rdi = range_doppler(mti_filter(frame));
    out.network_input = to_network_input(out.fast_time_rdi, expected_antennas);
    return out;
}

}  // namespace lar::radar
