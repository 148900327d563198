#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lar/config.hpp"
#include "lar/radar.hpp"

namespace lar {

/// Per-recording scene randomization. Ranges are the nominal range at t = 0;
/// drift and micro-motion must keep every target inside the unambiguous range.
struct SceneOptions {
    double min_range = 0.4;          // m
    double max_range = 2.0;          // m
    double max_velocity = 0.02;      // m/s, |radial drift|
    double min_amplitude = 0.5;
    double max_amplitude = 1.0;
    double max_angle = 0.9;          // rad, |angle|
    double min_micro_amplitude = 0.002;  // m
    double max_micro_amplitude = 0.008;  // m
    double min_micro_frequency = 0.2;    // Hz
    double max_micro_frequency = 1.0;    // Hz
};

struct SynthOptions {
    int num_labels = 6;
    int recordings_per_label = 20;
    int frames_per_recording = 50;
    double test_fraction = 0.2;
    double noise_sigma = 0.1;
    bool include_slow_time = false;
    std::uint64_t seed = 1;
    radar::RadarConfig radar;
    SceneOptions scene;

    /// Throws InvalidArgument.
    void validate() const;
    int channels() const { return (include_slow_time ? 4 : 2) * radar.n_antennas; }
    int test_recordings_per_label() const;

    /// Keys: num_labels, recordings_per_label, frames_per_recording,
    /// test_fraction, noise_sigma, include_slow_time, seed, radar.*, scene.*.
    static SynthOptions from_config(const KeyValueConfig& cfg);
    KeyValueConfig to_config() const;
    static std::span<const std::string_view> known_keys();
};

enum class Split { Train, Test };
std::string_view to_string(Split s);

struct Recording {
    int id = 0;
    int label = 0;
    Split split = Split::Train;
    int n_frames = 0;
    std::vector<float> frames;  // n_frames x channels x height x width
};

struct Dataset {
    int num_labels = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<Recording> recordings;
    radar::ChannelStats stats;  // training split, raw values
    bool standardized = false;
    KeyValueConfig params;

    std::size_t frame_size() const {
        return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    std::span<const float> frame(const Recording& r, int f) const {
        return {r.frames.data() + static_cast<std::size_t>(f) * frame_size(), frame_size()};
    }
    std::size_t frame_count(Split s) const;
};

/// Scene for one recording, drawn from the (seed, recording id) stream.
radar::TargetScene random_scene(int label, int recording_id, const SynthOptions& options);
/// Seed of the noise stream for one frame.
std::uint64_t frame_seed(std::uint64_t seed, int recording_id, long frame_index);

/// Per-label recordings with ids label * recordings_per_label + r; the test
/// split takes whole recordings. Frames hold raw network input values and
/// `stats` is computed over the training split.
Dataset synth_dataset(const SynthOptions& options);

/// Per-channel (x - mean) / std with the training-split statistics.
void standardize(Dataset& dataset);

/// Writes manifest.csv, dataset.cfg and one rec_NNNNN.rdi per recording.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
/// Reads raw values back and recomputes training-split statistics. Throws
/// Dataset for a missing or malformed manifest or tensor file.
Dataset read_dataset(const std::filesystem::path& dir);

std::string manifest_csv(const Dataset& dataset);
/// Little-endian "RDI1" tensor file contents.
std::vector<unsigned char> encode_recording(const Dataset& dataset, const Recording& recording);
/// 64-bit FNV-1a over the manifest and every tensor file in manifest order.
std::uint64_t dataset_checksum(const Dataset& dataset);
std::string hex64(std::uint64_t v);

/// Incremental 64-bit FNV-1a.
class Fnv1a {
public:
    void update(std::span<const unsigned char> bytes);
    void update(std::string_view text);
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace lar
