#include "lar/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "lar/error.hpp"

namespace lar {

namespace {

constexpr std::array<unsigned char, 4> kTensorMagic{'R', 'D', 'I', '1'};
constexpr std::uint64_t kSceneStream = 0x5CE9E;
constexpr std::uint64_t kNoiseStream = 0x9015E;
constexpr std::uint64_t kSplitStream = 0x5B117;

constexpr std::array<std::string_view, 27> kKnownKeys{
    "num_labels",
    "recordings_per_label",
    "frames_per_recording",
    "test_fraction",
    "noise_sigma",
    "include_slow_time",
    "seed",
    "radar.n_samples",
    "radar.n_chirps",
    "radar.n_antennas",
    "radar.bandwidth",
    "radar.chirp_duration",
    "radar.carrier_frequency",
    "radar.frame_rate",
    "radar.leakage",
    "scene.min_range",
    "scene.max_range",
    "scene.max_velocity",
    "scene.min_amplitude",
    "scene.max_amplitude",
    "scene.max_angle",
    "scene.min_micro_amplitude",
    "scene.max_micro_amplitude",
    "scene.min_micro_frequency",
    "scene.max_micro_frequency",
    "stats.mean",
    "stats.stddev",
};

std::mt19937_64 stream(std::uint64_t seed, int recording_id, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(recording_id), static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Latest time at which any frame (including slow-time warm-up frames) is sampled, in |t|.
double time_span(const SynthOptions& o) {
    const double warmup = o.include_slow_time ? o.radar.n_chirps - 1 : 0;
    const double frames = std::max<double>(o.frames_per_recording, warmup + 1);
    return (frames + 1) / o.radar.frame_rate;
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::filesystem::path tensor_path(const std::filesystem::path& dir, int id) {
    char name[32];
    std::snprintf(name, sizeof name, "rec_%05d.rdi", id);
    return dir / name;
}

void add_fast_channels(const radar::RawFrame& raw, float* out, int antennas) {
    const radar::RangeDopplerTensor t = radar::preprocess(raw, antennas);
    std::transform(t.network_input.data.begin(), t.network_input.data.end(), out,
                   [](double v) { return static_cast<float>(v); });
}

void add_slow_channels(std::span<const radar::RawFrame> window, float* out, int antennas) {
    const radar::RawFrame slow = radar::mti_filter(radar::slow_time_dataframe(window));
    const auto images = radar::range_doppler(slow);
    const radar::Tensor3 t = radar::to_network_input(images, antennas);
    std::transform(t.data.begin(), t.data.end(), out, [](double v) { return static_cast<float>(v); });
}

radar::ChannelStats training_stats(const Dataset& ds) {
    radar::ChannelStatsAccumulator acc(ds.channels);
    const int plane = ds.height * ds.width;
    for (const Recording& r : ds.recordings) {
        if (r.split != Split::Train) continue;
        for (int f = 0; f < r.n_frames; ++f) acc.add(ds.frame(r, f), ds.channels, plane);
    }
    return acc.finish();
}

[[noreturn]] void dataset_error(const std::string& what) { throw Error(ErrorCode::Dataset, what); }

}  // namespace

void SynthOptions::validate() const {
    if (num_labels < 2) throw Error(ErrorCode::InvalidArgument, "num_labels must be >= 2");
    if (recordings_per_label < 2) throw Error(ErrorCode::InvalidArgument, "recordings_per_label must be >= 2");
    if (frames_per_recording < 1) throw Error(ErrorCode::InvalidArgument, "frames_per_recording must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test_fraction must be in (0, 1)");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw Error(ErrorCode::InvalidArgument, "noise_sigma must be finite and >= 0");
    }
    radar.validate();
    const SceneOptions& s = scene;
    if (!(s.min_range > 0.0 && s.min_range <= s.max_range) || !(s.min_amplitude <= s.max_amplitude) ||
        !(s.min_micro_amplitude >= 0.0 && s.min_micro_amplitude <= s.max_micro_amplitude) ||
        !(s.min_micro_frequency >= 0.0 && s.min_micro_frequency <= s.max_micro_frequency) ||
        !(s.max_velocity >= 0.0) || !(s.max_angle >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "scene bounds are inconsistent");
    }
    const double margin = s.max_velocity * time_span(*this) + s.max_micro_amplitude;
    if (s.min_range - margin < 0.0 || s.max_range + margin >= radar.max_range()) {
        throw Error(ErrorCode::RangeAliased, "scene ranges plus drift leave [0, " +
                                                 format_double(radar.max_range()) + ") m");
    }
}

int SynthOptions::test_recordings_per_label() const {
    const int n = static_cast<int>(std::lround(recordings_per_label * test_fraction));
    return std::clamp(n, 1, recordings_per_label - 1);
}

SynthOptions SynthOptions::from_config(const KeyValueConfig& cfg) {
    SynthOptions o;
    o.num_labels = static_cast<int>(cfg.get_int("num_labels", o.num_labels));
    o.recordings_per_label = static_cast<int>(cfg.get_int("recordings_per_label", o.recordings_per_label));
    o.frames_per_recording = static_cast<int>(cfg.get_int("frames_per_recording", o.frames_per_recording));
    o.test_fraction = cfg.get_double("test_fraction", o.test_fraction);
    o.noise_sigma = cfg.get_double("noise_sigma", o.noise_sigma);
    o.include_slow_time = cfg.get_bool("include_slow_time", o.include_slow_time);
    o.seed = cfg.get_uint("seed", o.seed);
    auto& r = o.radar;
    r.n_samples = static_cast<int>(cfg.get_int("radar.n_samples", r.n_samples));
    r.n_chirps = static_cast<int>(cfg.get_int("radar.n_chirps", r.n_chirps));
    r.n_antennas = static_cast<int>(cfg.get_int("radar.n_antennas", r.n_antennas));
    r.bandwidth = cfg.get_double("radar.bandwidth", r.bandwidth);
    r.chirp_duration = cfg.get_double("radar.chirp_duration", r.chirp_duration);
    r.carrier_frequency = cfg.get_double("radar.carrier_frequency", r.carrier_frequency);
    r.frame_rate = cfg.get_double("radar.frame_rate", r.frame_rate);
    r.leakage = cfg.get_double("radar.leakage", r.leakage);
    auto& s = o.scene;
    s.min_range = cfg.get_double("scene.min_range", s.min_range);
    s.max_range = cfg.get_double("scene.max_range", s.max_range);
    s.max_velocity = cfg.get_double("scene.max_velocity", s.max_velocity);
    s.min_amplitude = cfg.get_double("scene.min_amplitude", s.min_amplitude);
    s.max_amplitude = cfg.get_double("scene.max_amplitude", s.max_amplitude);
    s.max_angle = cfg.get_double("scene.max_angle", s.max_angle);
    s.min_micro_amplitude = cfg.get_double("scene.min_micro_amplitude", s.min_micro_amplitude);
    s.max_micro_amplitude = cfg.get_double("scene.max_micro_amplitude", s.max_micro_amplitude);
    s.min_micro_frequency = cfg.get_double("scene.min_micro_frequency", s.min_micro_frequency);
    s.max_micro_frequency = cfg.get_double("scene.max_micro_frequency", s.max_micro_frequency);
    return o;
}

KeyValueConfig SynthOptions::to_config() const {
    KeyValueConfig c;
    c.set("num_labels", num_labels);
    c.set("recordings_per_label", recordings_per_label);
    c.set("frames_per_recording", frames_per_recording);
    c.set("test_fraction", test_fraction);
    c.set("noise_sigma", noise_sigma);
    c.set("include_slow_time", include_slow_time);
    c.set("seed", seed);
    c.set("radar.n_samples", radar.n_samples);
    c.set("radar.n_chirps", radar.n_chirps);
    c.set("radar.n_antennas", radar.n_antennas);
    c.set("radar.bandwidth", radar.bandwidth);
    c.set("radar.chirp_duration", radar.chirp_duration);
    c.set("radar.carrier_frequency", radar.carrier_frequency);
    c.set("radar.frame_rate", radar.frame_rate);
    c.set("radar.leakage", radar.leakage);
    c.set("scene.min_range", scene.min_range);
    c.set("scene.max_range", scene.max_range);
    c.set("scene.max_velocity", scene.max_velocity);
    c.set("scene.min_amplitude", scene.min_amplitude);
    c.set("scene.max_amplitude", scene.max_amplitude);
    c.set("scene.max_angle", scene.max_angle);
    c.set("scene.min_micro_amplitude", scene.min_micro_amplitude);
    c.set("scene.max_micro_amplitude", scene.max_micro_amplitude);
    c.set("scene.min_micro_frequency", scene.min_micro_frequency);
    c.set("scene.max_micro_frequency", scene.max_micro_frequency);
    return c;
}

std::span<const std::string_view> SynthOptions::known_keys() { return kKnownKeys; }

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

std::size_t Dataset::frame_count(Split s) const {
    std::size_t n = 0;
    for (const Recording& r : recordings) {
        if (r.split == s) n += static_cast<std::size_t>(r.n_frames);
    }
    return n;
}

radar::TargetScene random_scene(int label, int recording_id, const SynthOptions& o) {
    std::mt19937_64 rng = stream(o.seed, recording_id, kSceneStream);
    const SceneOptions& s = o.scene;
    radar::TargetScene scene;
    scene.count_label = label;
    for (int i = 0; i < label; ++i) {
        radar::Target t;
        t.range = uniform(rng, s.min_range, s.max_range);
        t.radial_velocity = uniform(rng, -s.max_velocity, s.max_velocity);
        t.amplitude = uniform(rng, s.min_amplitude, s.max_amplitude);
        t.angle = uniform(rng, -s.max_angle, s.max_angle);
        t.micro_motion_amplitude = uniform(rng, s.min_micro_amplitude, s.max_micro_amplitude);
        t.micro_motion_frequency = uniform(rng, s.min_micro_frequency, s.max_micro_frequency);
        t.micro_motion_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        scene.targets.push_back(t);
    }
    return scene;
}

std::uint64_t frame_seed(std::uint64_t seed, int recording_id, long frame_index) {
    std::mt19937_64 rng = stream(seed, recording_id, kNoiseStream);
    return rng() ^ (static_cast<std::uint64_t>(frame_index) * 0x9E3779B97F4A7C15ULL);
}

Dataset synth_dataset(const SynthOptions& o) {
    o.validate();
    Dataset ds;
    ds.num_labels = o.num_labels;
    ds.channels = o.channels();
    ds.height = o.radar.n_samples / 2;
    ds.width = o.radar.n_chirps;
    ds.params = o.to_config();

    const int n_test = o.test_recordings_per_label();
    const int antennas = o.radar.n_antennas;
    const std::size_t fast_size = static_cast<std::size_t>(2 * antennas * ds.height * ds.width);
    for (int label = 0; label < o.num_labels; ++label) {
        std::vector<int> order(static_cast<std::size_t>(o.recordings_per_label));
        for (int r = 0; r < o.recordings_per_label; ++r) order[static_cast<std::size_t>(r)] = r;
        std::mt19937_64 split_rng = stream(o.seed, label, kSplitStream);
        std::shuffle(order.begin(), order.end(), split_rng);
        std::vector<bool> is_test(order.size(), false);
        for (int i = 0; i < n_test; ++i) is_test[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

        for (int r = 0; r < o.recordings_per_label; ++r) {
            Recording rec;
            rec.id = label * o.recordings_per_label + r;
            rec.label = label;
            rec.split = is_test[static_cast<std::size_t>(r)] ? Split::Test : Split::Train;
            rec.n_frames = o.frames_per_recording;
            rec.frames.resize(static_cast<std::size_t>(rec.n_frames) * ds.frame_size());

            const radar::TargetScene scene = random_scene(label, rec.id, o);
            const long first = o.include_slow_time ? -static_cast<long>(o.radar.n_chirps - 1) : 0;
            std::deque<radar::RawFrame> window;
            for (long f = first; f < rec.n_frames; ++f) {
                radar::RawFrame raw =
                    radar::synth_frame(scene, o.radar, f, o.noise_sigma, frame_seed(o.seed, rec.id, f));
                float* out = f >= 0 ? rec.frames.data() + static_cast<std::size_t>(f) * ds.frame_size() : nullptr;
                if (out) add_fast_channels(raw, out, antennas);
                if (o.include_slow_time) {
                    window.push_back(std::move(raw));
                    if (window.size() > static_cast<std::size_t>(o.radar.n_chirps)) window.pop_front();
                    if (out) {
                        const std::vector<radar::RawFrame> frames(window.begin(), window.end());
                        add_slow_channels(frames, out + fast_size, antennas);
                    }
                }
            }
            ds.recordings.push_back(std::move(rec));
        }
    }
    ds.stats = training_stats(ds);
    ds.params.set("stats.mean", join(ds.stats.mean));
    ds.params.set("stats.stddev", join(ds.stats.stddev));
    return ds;
}

void standardize(Dataset& ds) {
    if (ds.standardized) return;
    const int plane = ds.height * ds.width;
    for (Recording& r : ds.recordings) {
        for (int f = 0; f < r.n_frames; ++f) {
            std::span<float> frame(r.frames.data() + static_cast<std::size_t>(f) * ds.frame_size(), ds.frame_size());
            radar::standardize(frame, ds.stats, plane);
        }
    }
    ds.standardized = true;
}

std::string manifest_csv(const Dataset& ds) {
    std::string out = "recording_id,label,split,n_frames\n";
    for (const Recording& r : ds.recordings) {
        out += std::to_string(r.id) + ',' + std::to_string(r.label) + ',' + std::string(to_string(r.split)) + ',' +
               std::to_string(r.n_frames) + '\n';
    }
    return out;
}

std::vector<unsigned char> encode_recording(const Dataset& ds, const Recording& r) {
    std::vector<unsigned char> out;
    out.reserve(20 + r.frames.size() * 4);
    for (unsigned char m : kTensorMagic) out.push_back(m);
    put_u32(out, static_cast<std::uint32_t>(ds.channels));
    put_u32(out, static_cast<std::uint32_t>(ds.height));
    put_u32(out, static_cast<std::uint32_t>(ds.width));
    put_u32(out, static_cast<std::uint32_t>(r.n_frames));
    for (float v : r.frames) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    if (ds.standardized) throw Error(ErrorCode::InvalidArgument, "write_dataset expects raw (unstandardized) values");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    {
        std::ofstream out(dir / "manifest.csv", std::ios::binary);
        out << manifest_csv(ds);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "manifest.csv").string());
    }
    ds.params.save(dir / "dataset.cfg");
    for (const Recording& r : ds.recordings) {
        const auto bytes = encode_recording(ds, r);
        std::ofstream out(tensor_path(dir, r.id), std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tensor_path(dir, r.id).string());
    }
}

Dataset read_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.csv";
    std::ifstream manifest(manifest_path);
    if (!manifest) dataset_error("dataset manifest not found: " + manifest_path.string());
    const auto cfg_path = dir / "dataset.cfg";
    if (!std::filesystem::exists(cfg_path)) dataset_error("dataset parameters not found: " + cfg_path.string());

    Dataset ds;
    ds.params = KeyValueConfig::load(cfg_path);
    ds.num_labels = static_cast<int>(ds.params.get_int("num_labels", 0));
    if (ds.num_labels < 2) dataset_error(cfg_path.string() + ": num_labels missing or < 2");

    std::string line;
    if (!std::getline(manifest, line) || line != "recording_id,label,split,n_frames") {
        dataset_error(manifest_path.string() + ": unexpected header");
    }
    int line_no = 1;
    while (std::getline(manifest, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id, label, split, frames;
        if (!std::getline(fields, id, ',') || !std::getline(fields, label, ',') || !std::getline(fields, split, ',') ||
            !std::getline(fields, frames, ',')) {
            dataset_error(manifest_path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
        }
        Recording r;
        try {
            r.id = std::stoi(id);
            r.label = std::stoi(label);
            r.n_frames = std::stoi(frames);
        } catch (const std::exception&) {
            dataset_error(manifest_path.string() + ":" + std::to_string(line_no) + ": bad number");
        }
        if (split == "train") {
            r.split = Split::Train;
        } else if (split == "test") {
            r.split = Split::Test;
        } else {
            dataset_error(manifest_path.string() + ":" + std::to_string(line_no) + ": bad split '" + split + "'");
        }
        if (r.label < 0 || r.label >= ds.num_labels || r.n_frames < 0) {
            dataset_error(manifest_path.string() + ":" + std::to_string(line_no) + ": label or frame count out of range");
        }

        const auto path = tensor_path(dir, r.id);
        std::ifstream in(path, std::ios::binary);
        if (!in) dataset_error("missing tensor file " + path.string());
        std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.size() < 20 || !std::equal(kTensorMagic.begin(), kTensorMagic.end(), bytes.begin())) {
            dataset_error(path.string() + ": bad RDI1 header");
        }
        const int c = static_cast<int>(get_u32(&bytes[4]));
        const int h = static_cast<int>(get_u32(&bytes[8]));
        const int w = static_cast<int>(get_u32(&bytes[12]));
        const int n = static_cast<int>(get_u32(&bytes[16]));
        if (ds.recordings.empty()) {
            ds.channels = c;
            ds.height = h;
            ds.width = w;
        } else if (c != ds.channels || h != ds.height || w != ds.width) {
            dataset_error(path.string() + ": tensor shape differs from earlier recordings");
        }
        if (n != r.n_frames) dataset_error(path.string() + ": frame count disagrees with manifest");
        const std::size_t values = static_cast<std::size_t>(n) * ds.frame_size();
        if (bytes.size() != 20 + 4 * values) dataset_error(path.string() + ": truncated tensor data");
        r.frames.resize(values);
        for (std::size_t i = 0; i < values; ++i) r.frames[i] = std::bit_cast<float>(get_u32(&bytes[20 + 4 * i]));
        ds.recordings.push_back(std::move(r));
    }
    if (ds.recordings.empty()) dataset_error(manifest_path.string() + ": no recordings");
    ds.stats = training_stats(ds);
    return ds;
}

void Fnv1a::update(std::span<const unsigned char> bytes) {
    for (unsigned char b : bytes) {
        hash_ ^= b;
        hash_ *= 0x100000001b3ULL;
    }
}

void Fnv1a::update(std::string_view text) {
    update(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::uint64_t dataset_checksum(const Dataset& ds) {
    if (ds.standardized) throw Error(ErrorCode::InvalidArgument, "checksum is defined over raw values");
    Fnv1a h;
    h.update(manifest_csv(ds));
    for (const Recording& r : ds.recordings) h.update(encode_recording(ds, r));
    return h.value();
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace lar
