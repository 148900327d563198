#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "lar/dataset.hpp"
#include "lar/error.hpp"

using namespace lar;

namespace {

SynthOptions small_options() {
    SynthOptions o;
    o.num_labels = 3;
    o.recordings_per_label = 5;
    o.frames_per_recording = 4;
    o.radar.n_samples = 32;
    o.radar.n_chirps = 16;
    o.scene.min_range = 0.3;
    o.scene.max_range = 0.9;
    o.seed = 11;
    return o;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lar_test_dataset_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("L=6, 10 recordings per label, 50 frames gives 3000 samples and 600 test samples") {
    SynthOptions o;
    o.recordings_per_label = 10;
    o.frames_per_recording = 50;
    const Dataset ds = synth_dataset(o);
    CHECK(ds.recordings.size() == 60);
    CHECK(ds.frame_count(Split::Train) + ds.frame_count(Split::Test) == 3000);
    CHECK(ds.frame_count(Split::Test) == 600);
    CHECK(ds.channels == 6);
    CHECK(ds.height == 32);
    CHECK(ds.width == 64);

    std::map<std::pair<int, Split>, int> histogram;
    std::set<int> ids;
    for (const Recording& r : ds.recordings) {
        CHECK(r.frames.size() == static_cast<std::size_t>(r.n_frames) * ds.frame_size());
        ++histogram[{r.label, r.split}];
        CHECK(ids.insert(r.id).second);
    }
    for (int label = 0; label < 6; ++label) {
        CHECK(histogram[{label, Split::Train}] == 8);
        CHECK(histogram[{label, Split::Test}] == 2);
    }
}

TEST_CASE("label 0 recordings hold only noise and leakage") {
    SynthOptions o = small_options();
    const Dataset ds = synth_dataset(o);
    for (const Recording& r : ds.recordings) {
        if (r.label != 0) continue;
        for (int f = 0; f < r.n_frames; ++f) {
            const radar::TargetScene empty;
            const auto raw = radar::synth_frame(empty, o.radar, f, o.noise_sigma, frame_seed(o.seed, r.id, f));
            const auto expected = radar::preprocess(raw).network_input;
            const auto stored = ds.frame(r, f);
            for (std::size_t i = 0; i < stored.size(); ++i) {
                REQUIRE(stored[i] == static_cast<float>(expected.data[i]));
            }
        }
    }

    o.noise_sigma = 0.0;
    const Dataset quiet = synth_dataset(o);
    for (const Recording& r : quiet.recordings) {
        if (r.label != 0) continue;
        for (float v : r.frames) REQUIRE(v == 0.0f);
    }
}

TEST_CASE("scenes have one target per count") {
    const SynthOptions o = small_options();
    for (int label = 0; label < o.num_labels; ++label) {
        const auto scene = random_scene(label, label * 7, o);
        CHECK(scene.count_label == label);
        CHECK(scene.targets.size() == static_cast<std::size_t>(label));
        for (const auto& t : scene.targets) {
            CHECK(t.range >= o.scene.min_range);
            CHECK(t.range <= o.scene.max_range);
            CHECK(t.micro_motion_amplitude >= o.scene.min_micro_amplitude);
        }
    }
}

TEST_CASE("same seed gives identical datasets, different seed does not") {
    const SynthOptions o = small_options();
    const Dataset a = synth_dataset(o);
    const Dataset b = synth_dataset(o);
    CHECK(dataset_checksum(a) == dataset_checksum(b));
    for (std::size_t i = 0; i < a.recordings.size(); ++i) CHECK(a.recordings[i].frames == b.recordings[i].frames);

    SynthOptions other = o;
    other.seed = 12;
    CHECK(dataset_checksum(synth_dataset(other)) != dataset_checksum(a));
}

TEST_CASE("write then read round-trips values, split and checksum") {
    const SynthOptions o = small_options();
    const Dataset ds = synth_dataset(o);
    const auto dir = scratch_dir("roundtrip");
    write_dataset(ds, dir);
    CHECK(std::filesystem::exists(dir / "manifest.csv"));
    CHECK(std::filesystem::exists(dir / "dataset.cfg"));
    CHECK(std::filesystem::file_size(dir / "rec_00000.rdi") == 20 + 4 * ds.recordings[0].frames.size());

    const Dataset back = read_dataset(dir);
    CHECK(dataset_checksum(back) == dataset_checksum(ds));
    REQUIRE(back.recordings.size() == ds.recordings.size());
    for (std::size_t i = 0; i < ds.recordings.size(); ++i) {
        CHECK(back.recordings[i].id == ds.recordings[i].id);
        CHECK(back.recordings[i].split == ds.recordings[i].split);
        CHECK(back.recordings[i].frames == ds.recordings[i].frames);
    }
    CHECK(back.stats.mean == ds.stats.mean);
    CHECK(SynthOptions::from_config(back.params).to_config().serialize() == o.to_config().serialize());
    std::filesystem::remove_all(dir);
}

TEST_CASE("missing or corrupt files are dataset errors") {
    const auto dir = scratch_dir("missing");
    std::filesystem::create_directories(dir);
    try {
        (void)read_dataset(dir);
        FAIL("expected a dataset error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Dataset);
    }

    write_dataset(synth_dataset(small_options()), dir);
    std::filesystem::resize_file(dir / "rec_00003.rdi", 100);
    try {
        (void)read_dataset(dir);
        FAIL("expected a dataset error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Dataset);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("standardization uses training statistics") {
    Dataset ds = synth_dataset(small_options());
    standardize(ds);
    const int plane = ds.height * ds.width;
    for (int c = 0; c < ds.channels; ++c) {
        double sum = 0.0;
        double sum_sq = 0.0;
        double n = 0.0;
        for (const Recording& r : ds.recordings) {
            if (r.split != Split::Train) continue;
            for (int f = 0; f < r.n_frames; ++f) {
                const auto frame = ds.frame(r, f);
                for (int i = 0; i < plane; ++i) {
                    const double v = frame[static_cast<std::size_t>(c * plane + i)];
                    sum += v;
                    sum_sq += v * v;
                    n += 1.0;
                }
            }
        }
        const double mean = sum / n;
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(std::sqrt(sum_sq / n - mean * mean) - 1.0) < 1e-6);
    }
}

TEST_CASE("slow-time channels are appended after the fast-time channels") {
    SynthOptions o = small_options();
    const Dataset fast = synth_dataset(o);
    o.include_slow_time = true;
    const Dataset both = synth_dataset(o);
    CHECK(both.channels == 2 * fast.channels);
    const std::size_t fast_size = fast.frame_size();
    for (std::size_t i = 0; i < fast.recordings.size(); ++i) {
        for (int f = 0; f < fast.recordings[i].n_frames; ++f) {
            const auto a = fast.frame(fast.recordings[i], f);
            const auto b = both.frame(both.recordings[i], f);
            for (std::size_t k = 0; k < fast_size; ++k) REQUIRE(a[k] == b[k]);
        }
    }
}

TEST_CASE("invalid options are rejected") {
    SynthOptions o = small_options();
    o.num_labels = 1;
    CHECK_THROWS_AS(o.validate(), Error);
    o = small_options();
    o.scene.max_range = 5.0;
    try {
        o.validate();
        FAIL("expected RangeAliased");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RangeAliased);
    }
}
