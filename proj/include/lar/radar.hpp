#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace lar::radar {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct RadarConfig {
    int n_samples = 64;   // N_S, fast-time samples per chirp
    int n_chirps = 64;    // N_C, chirps per frame
    int n_antennas = 3;
    double bandwidth = 2.0e9;         // Hz
    double chirp_duration = 300e-6;   // s, also the chirp repetition interval
    double carrier_frequency = 60e9;  // Hz
    double frame_rate = 10.0;         // Hz
    double leakage = 1.0;             // constant Tx/Rx leakage, ADC units

    /// Throws InvalidArgument on non power-of-two sizes or non-positive physics.
    void validate() const;

    double wavelength() const { return kSpeedOfLight / carrier_frequency; }
    double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }
    /// Largest range representable in the positive half of the range spectrum.
    double max_range() const { return range_resolution() * n_samples / 2; }
    double velocity_resolution() const { return wavelength() / (2.0 * n_chirps * chirp_duration); }
    double slow_velocity_resolution() const { return wavelength() * frame_rate / (2.0 * n_chirps); }
};

/// Point scatterer. Its range at absolute time t is
/// range + radial_velocity * t + micro_motion_amplitude * sin(2 pi f t + phase).
struct Target {
    double range = 1.0;                  // m
    double radial_velocity = 0.0;        // m/s
    double amplitude = 1.0;
    double angle = 0.0;                  // rad, from boresight
    double micro_motion_amplitude = 0.0; // m
    double micro_motion_frequency = 0.0; // Hz
    double micro_motion_phase = 0.0;     // rad
};

struct TargetScene {
    std::vector<Target> targets;
    int count_label = 0;
};

/// Real samples laid out [antenna][sample][chirp].
struct RawFrame {
    int antennas = 0;
    int samples = 0;
    int chirps = 0;
    std::vector<double> data;

    RawFrame() = default;
    RawFrame(int a, int s, int c) : antennas(a), samples(s), chirps(c), data(static_cast<std::size_t>(a * s * c), 0.0) {}

    double& at(int a, int s, int c) { return data[index(a, s, c)]; }
    double at(int a, int s, int c) const { return data[index(a, s, c)]; }

private:
    std::size_t index(int a, int s, int c) const {
        return (static_cast<std::size_t>(a) * static_cast<std::size_t>(samples) + static_cast<std::size_t>(s)) *
                   static_cast<std::size_t>(chirps) +
               static_cast<std::size_t>(c);
    }
};

/// Complex image laid out [row][col]; for range-Doppler images rows are range
/// bins and cols are Doppler bins with zero velocity at cols / 2.
struct ComplexImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::complex<double>> data;

    ComplexImage() = default;
    ComplexImage(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c)) {}

    std::complex<double>& at(int r, int c) { return data[static_cast<std::size_t>(r * cols + c)]; }
    const std::complex<double>& at(int r, int c) const { return data[static_cast<std::size_t>(r * cols + c)]; }
};

/// Real tensor laid out [channel][row][col].
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c, int h, int w) : channels(c), height(h), width(w), data(static_cast<std::size_t>(c * h * w), 0.0) {}

    double& at(int c, int r, int x) { return data[static_cast<std::size_t>((c * height + r) * width + x)]; }
    double at(int c, int r, int x) const { return data[static_cast<std::size_t>((c * height + r) * width + x)]; }
};

struct RangeDopplerTensor {
    std::vector<ComplexImage> fast_time_rdi;  // one per antenna
    std::vector<ComplexImage> slow_time_rdi;  // empty unless computed
    Tensor3 network_input;                    // 2 * antennas channels
};

/// Synthesizes one IF frame: per target a beat tone 2 B r / (c T_c) along fast
/// time, carrier phase 4 pi f_c r(t) / c per chirp at absolute time
/// frame_index / frame_rate + k T_c, antenna phase pi a sin(angle), plus
/// leakage and seeded white noise. Throws RangeAliased for ranges outside
/// [0, max_range).
RawFrame synth_frame(const TargetScene& scene, const RadarConfig& config, long frame_index,
                     double noise_sigma, std::uint64_t seed);

/// Subtracts, per antenna and sample row, the mean across chirps.
RawFrame mti_filter(const RawFrame& frame);

/// Sums each of N_C frames over its chirps and stacks the resulting vectors
/// column-wise. Throws WrongFrameCount unless frames.size() == chirps.
RawFrame slow_time_dataframe(std::span<const RawFrame> frames);

/// Symmetric Hamming window of length n.
std::vector<double> hamming(int n);

/// Hamming-windowed copy of one antenna's dataframe, [sample][chirp].
std::vector<double> windowed(const RawFrame& frame, int antenna);

/// Full (unshifted) 2D DFT of the windowed dataframe of one antenna.
ComplexImage full_spectrum(const RawFrame& frame, int antenna);

/// Per antenna: windowed 2D DFT, positive half of the range axis, Doppler axis
/// shifted so zero velocity sits at bin chirps / 2.
std::vector<ComplexImage> range_doppler(const RawFrame& frame);

/// Channel layout [Re(a0), Im(a0), Re(a1), Im(a1), ...]. Throws ChannelMismatch
/// unless exactly `expected_antennas` images are given.
Tensor3 to_network_input(std::span<const ComplexImage> images, int expected_antennas = 3);

/// Per-channel mean and standard deviation.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

class ChannelStatsAccumulator {
public:
    explicit ChannelStatsAccumulator(int channels);
    void add(const Tensor3& t);
    void add(std::span<const float> chw, int channels, int plane);
    ChannelStats finish() const;

private:
    std::vector<double> sum_;
    std::vector<double> sum_sq_;
    std::vector<double> count_;
};

/// (x - mean) / std per channel, in place.
void standardize(Tensor3& t, const ChannelStats& stats);
void standardize(std::span<float> chw, const ChannelStats& stats, int plane);

/// mti_filter -> range_doppler -> to_network_input on one raw frame.
RangeDopplerTensor preprocess(const RawFrame& frame, int expected_antennas = 3);

}  // namespace lar::radar
