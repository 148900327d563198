#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lar/commands.hpp"
#include "lar/error.hpp"
#include "lar/geometry.hpp"
#include "lar/losses.hpp"
#include "lar/radar.hpp"
#include "lar/smoothing.hpp"
#include "network_support.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace lar;
using std::numbers::pi;

namespace {

// Pinned tolerances and runtime budgets.
constexpr double kOracleTolerance = 1e-10;
constexpr double kLossFdStep = 1e-5;
constexpr double kLossFdTolerance = 1e-4;
constexpr double kNetworkFdTolerance = 1e-3;
constexpr double kGapTolerance = 0.05;
constexpr int kRandomConfigurations = 10000;
constexpr double kMtiTolerance = 1e-9;
constexpr double kParsevalTolerance = 1e-6;
constexpr double kSmoothingTolerance = 1e-12;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& what) {
        if (pass) detail.clear();
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome(const fs::path&)> run;
};

std::vector<std::pair<const char*, DmlLossConfig>> metric_losses() {
    return {
        {"triplet", {LossKind::Triplet, 1.0, 3, 0.0}},
        {"mc_n_pair", {LossKind::McNPair, 1.0, 3, 0.0}},
        {"constellation", {LossKind::Constellation, 1.0, 3, 0.0}},
        {"lar", {LossKind::LAR, 1.0, 3, 0.0}},
    };
}

double oracle_value(const EmbeddingBatch& b, const DmlLossConfig& cfg) {
    namespace oracle = testing::oracle;
    switch (cfg.kind) {
        case LossKind::Triplet: return oracle::triplet(b, cfg.margin);
        case LossKind::McNPair: return oracle::mc_n_pair(b);
        case LossKind::Constellation: return oracle::constellation(b, cfg.constellation_k);
        default: return oracle::lar(b);
    }
}

Outcome loss_oracles(const fs::path&) {
    Outcome o;
    double worst = 0.0;
    for (const auto& [name, cfg] : metric_losses()) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const int labels = 4 + static_cast<int>(seed % 5);
            const auto b = testing::random_smart_batch(100 + seed, labels, 16);
            const double err = std::abs(dml_loss(b, cfg).value - oracle_value(b, cfg));
            worst = std::max(worst, err);
            if (!(err < kOracleTolerance)) o.fail(std::string(name) + " seed " + std::to_string(seed) + " err " + fmt(err));
        }
    }
    if (o.pass) o.detail = "max abs err " + fmt(worst) + " over 4 losses x 20 batches";
    return o;
}

Outcome gradients(const fs::path&) {
    Outcome o;
    double worst_loss = 0.0;
    for (const auto& [name, cfg] : metric_losses()) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto b = testing::random_smart_batch(1000 + seed, 6, 8);
            const Matrix analytic = dml_loss(b, cfg).grads;
            const Matrix numeric = finite_diff_gradient(
                [&](const EmbeddingBatch& x) { return dml_loss(x, cfg).value; }, b, kLossFdStep);
            const double err = testing::max_relative_error(analytic, numeric);
            worst_loss = std::max(worst_loss, err);
            if (!(err < kLossFdTolerance)) o.fail(std::string(name) + " seed " + std::to_string(seed) + " rel " + fmt(err));
        }
    }
    double worst_net = 0.0;
    for (DmlKind kind : {DmlKind::None, DmlKind::Triplet, DmlKind::McNPair, DmlKind::Constellation, DmlKind::LAR}) {
        const double err = testing::network_gradient_error(kind);
        worst_net = std::max(worst_net, err);
        if (!(err < kNetworkFdTolerance)) o.fail("network " + std::string(to_string(kind)) + " rel " + fmt(err));
    }
    if (o.pass) o.detail = "loss max rel " + fmt(worst_loss) + ", network max rel " + fmt(worst_net);
    return o;
}

Outcome uniform_optimum(const fs::path&) {
    Outcome o;
    double worst_gap = 0.0;
    for (int L = 3; L <= 8; ++L) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const GeometryReport r = measure_angles(optimize_configuration(L, 2, seed));
            worst_gap = std::max(worst_gap, r.max_gap_deviation);
            if (!(r.max_gap_deviation <= kGapTolerance) || !r.ranking_preserved) {
                o.fail("L=" + std::to_string(L) + " seed " + std::to_string(seed) + " gap dev " +
                       fmt(r.max_gap_deviation) + (r.ranking_preserved ? "" : " order broken"));
            }
        }
        const int not_beaten = count_configurations_not_beaten(L, 2, kRandomConfigurations, 1);
        if (not_beaten != 0) o.fail("L=" + std::to_string(L) + " " + std::to_string(not_beaten) + " random configs tie or win");
    }
    if (o.pass) o.detail = "max gap deviation " + fmt(worst_gap);
    return o;
}

Outcome perturbation(const fs::path&) {
    Outcome o;
    const std::vector<EpsilonSpec> eps{{0.01, false}, {0.1, false}, {0.5, false}, {0.9, true}};
    int rows = 0;
    for (const InequalityRow& r : perturbation_inequality_check(12, eps)) {
        ++rows;
        if (!r.holds) {
            o.fail("l=" + std::to_string(r.l) + " eps " + fmt(r.epsilon) + " " + to_string(r.form) + " lhs " + fmt(r.lhs) +
                   " rhs " + fmt(r.rhs));
        }
    }
    if (o.pass) o.detail = std::to_string(rows) + " rows hold";
    return o;
}

struct Peak {
    int row = 0;
    int col = 0;
};

Peak strongest(const radar::ComplexImage& img) {
    Peak p;
    double best = -1.0;
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c)
            if (std::norm(img.at(r, c)) > best) {
                best = std::norm(img.at(r, c));
                p = {r, c};
            }
    return p;
}

Outcome radar_physics(const fs::path&) {
    using namespace radar;
    Outcome o;
    RadarConfig cfg;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> range(0.3, cfg.max_range() - 0.3);
    std::uniform_real_distribution<double> speed(0.5, 2.0);
    std::uniform_real_distribution<double> angle(-0.9, 0.9);
    std::bernoulli_distribution sign;
    const double amplitude = 1.0;
    const double sigma = amplitude / std::sqrt(2.0 * 100.0);
    double worst_mti = 0.0;
    double worst_parseval = 0.0;
    for (int scene = 0; scene < 50; ++scene) {
        Target t;
        t.range = range(rng);
        t.radial_velocity = sign(rng) ? speed(rng) : -speed(rng);
        t.amplitude = amplitude;
        t.angle = angle(rng);
        const RawFrame f = synth_frame({{t}, 1}, cfg, 0, sigma, 5000 + static_cast<std::uint64_t>(scene));
        const auto rdi = range_doppler(mti_filter(f));
        const double mid_range = t.range + t.radial_velocity * cfg.n_chirps * cfg.chirp_duration / 2;
        const double range_bin = mid_range / cfg.range_resolution();
        const double doppler_bin = cfg.n_chirps / 2 + t.radial_velocity / cfg.velocity_resolution();
        for (int a = 0; a < cfg.n_antennas; ++a) {
            const Peak p = strongest(rdi[static_cast<std::size_t>(a)]);
            if (std::abs(p.row - range_bin) > 1.0 || std::abs(p.col - doppler_bin) > 1.0) {
                o.fail("scene " + std::to_string(scene) + " antenna " + std::to_string(a) + " peak (" + std::to_string(p.row) +
                       "," + std::to_string(p.col) + ") expected (" + fmt(range_bin) + "," + fmt(doppler_bin) + ")");
            }
        }

        Target still = t;
        still.radial_velocity = 0.0;
        const RawFrame s = mti_filter(synth_frame({{still}, 1}, cfg, scene, 0.0, 1));
        for (double v : s.data) worst_mti = std::max(worst_mti, std::abs(v));

        for (int a = 0; a < cfg.n_antennas; ++a) {
            double time_energy = 0.0;
            for (double v : windowed(f, a)) time_energy += v * v;
            double freq_energy = 0.0;
            for (const auto& v : full_spectrum(f, a).data) freq_energy += std::norm(v);
            freq_energy /= static_cast<double>(cfg.n_samples) * cfg.n_chirps;
            worst_parseval = std::max(worst_parseval, std::abs(freq_energy - time_energy) / time_energy);
        }
    }
    if (!(worst_mti < kMtiTolerance)) o.fail("MTI residual " + fmt(worst_mti));
    if (!(worst_parseval < kParsevalTolerance)) o.fail("Parseval rel err " + fmt(worst_parseval));
    if (o.pass) o.detail = "50 scenes in +-1 bin, MTI residual " + fmt(worst_mti) + ", Parseval rel " + fmt(worst_parseval);
    return o;
}

Outcome smoothing(const fs::path&) {
    Outcome o;
    double worst = 0.0;
    for (double alpha : {0.1, 0.3, 0.5}) {
        SmoothingState s(alpha);
        const double initial = -2.0;
        const double target = 5.0;
        s.update(initial);
        for (int k = 1; k <= 100; ++k) {
            const double err = s.update(target) - target;
            const double expected = std::pow(1.0 - alpha, k) * (initial - target);
            worst = std::max(worst, std::abs(err - expected));
        }
    }
    if (!(worst < kSmoothingTolerance)) o.fail("max deviation " + fmt(worst));
    else o.detail = "max deviation " + fmt(worst);
    return o;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

cmd::Invocation invocation(const KeyValueConfig& config, const fs::path& out, const fs::path& dataset = {},
                           const fs::path& checkpoint = {}) {
    fs::remove_all(out);
    fs::create_directories(out);
    return {config, out, dataset, checkpoint, [](const std::string&) {}};
}

Outcome ablation_ordering(const fs::path& work) {
    Outcome o;
    const fs::path dataset = work / "c7" / "dataset";
    const fs::path out = work / "c7" / "ablation";
    cmd::synth(invocation({}, dataset));
    KeyValueConfig cfg;
    cfg.set("seeds", std::string("1,2,3"));
    try {
        cmd::ablation(invocation(cfg, out, dataset));
    } catch (const Error& e) {
        o.fail(std::string("ablation cell failed [") + to_string(e.code()) + "]: " + e.what());
    }

    std::map<std::string, double> median;
    for (const auto& row : read_csv(out / "ablation_summary.csv")) {
        if (row.size() < 4 || row[0] == "setting") continue;
        median[row[0]] = std::stod(row[3]);
    }
    const char* losses[] = {"MSE", "MSE + Triplet", "MSE + Mc-N-Pair", "MSE + Constellation", "MSE + LAR"};
    for (const char* l : losses) {
        if (!median.contains(l) || !median.contains(std::string(l) + " + ES")) {
            o.fail(std::string("missing summary row for ") + l);
            return o;
        }
    }
    const double mse = median["MSE"];
    const double con = median["MSE + Constellation"];
    const double lar = median["MSE + LAR"];
    if (!(lar >= con)) o.fail("LAR " + fmt(lar) + " < Constellation " + fmt(con));
    if (!(con >= mse)) o.fail("Constellation " + fmt(con) + " < MSE " + fmt(mse));
    for (const char* l : losses) {
        const double plain = median[l];
        const double es = median[std::string(l) + " + ES"];
        if (!(es >= plain)) o.fail(std::string(l) + " + ES " + fmt(es) + " < " + fmt(plain));
    }
    const double best = median["MSE + LAR + ES"];
    for (const auto& [setting, acc] : median) {
        if (acc > best) o.fail(setting + " " + fmt(acc) + " beats MSE + LAR + ES " + fmt(best));
    }
    for (const auto& row : read_csv(out / "ablation_table.csv")) {
        if (row.size() < 6 || row[0] == "loss") continue;
        if (row[5] != "ok") continue;
        if (!(std::stod(row[4]) >= std::stod(row[3]))) {
            o.fail(row[0] + " es=" + row[1] + " seed " + row[2] + " accuracy+-1 below accuracy");
        }
    }
    std::string table;
    for (const char* l : losses) {
        table += std::string(table.empty() ? "" : ", ") + l + " " + fmt(median[l]) + "/" + fmt(median[std::string(l) + " + ES"]);
    }
    o.detail = (o.pass ? "" : o.detail + " | ") + "median acc plain/ES: " + table;
    return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).generic_string();
        if (entry.path().filename() == "manifest.txt") {
            KeyValueConfig m = KeyValueConfig::load(entry.path());
            std::string kept;
            for (const auto& [k, v] : m.entries()) {
                if (k == "wall_clock_seconds" || k == "output") continue;
                kept += k + "=" + v + "\n";
            }
            files[rel] = kept;
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[rel] = ss.str();
    }
    return files;
}

using Command = void (*)(const cmd::Invocation&);

// Runs a command, then replays it from the config.* entries of its manifest.
void run_twice(Command command, const KeyValueConfig& config, const fs::path& first, const fs::path& second,
               const fs::path& dataset, const fs::path& checkpoint, Outcome& o, const char* name) {
    auto attempt = [&](const KeyValueConfig& c, const fs::path& out) {
        try {
            command(invocation(c, out, dataset, checkpoint));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::VerificationFailed) throw;
        }
    };
    attempt(config, first);
    const KeyValueConfig manifest = KeyValueConfig::load(first / "manifest.txt");
    KeyValueConfig replay;
    for (const auto& [k, v] : manifest.entries()) {
        if (k.rfind("config.", 0) == 0) replay.set(k.substr(7), v);
    }
    // Shift the heap so the rerun sees different buffer addresses.
    std::vector<std::vector<char>> ballast;
    for (std::size_t i = 1; i <= 7; ++i) ballast.emplace_back(24 * i + 8);
    attempt(replay, second);
    const auto a = snapshot(first);
    const auto b = snapshot(second);
    int csvs = 0;
    for (const auto& [rel, bytes] : a) {
        if (rel.ends_with(".csv")) ++csvs;
        const auto it = b.find(rel);
        if (it == b.end()) o.fail(std::string(name) + ": " + rel + " missing on rerun");
        else if (it->second != bytes) o.fail(std::string(name) + ": " + rel + " differs");
    }
    if (a.size() != b.size()) o.fail(std::string(name) + ": file sets differ");
    if (csvs == 0 && std::string(name) != "synth") o.fail(std::string(name) + ": no CSV outputs");
}

Outcome reproducibility(const fs::path& work) {
    Outcome o;
    const fs::path root = work / "c8";
    auto cfg = [](std::initializer_list<std::pair<const char*, const char*>> kv) {
        KeyValueConfig c;
        for (const auto& [k, v] : kv) c.set(k, std::string(v));
        return c;
    };

    run_twice(cmd::verify_geometry,
              cfg({{"l_min", "5"}, {"l_max", "6"}, {"seeds", "2"}, {"random_samples", "500"}, {"steps", "800"}}),
              root / "verify_a", root / "verify_b", {}, {}, o, "verify-geometry");

    const auto synth_cfg = cfg({{"num_labels", "3"},
                                {"recordings_per_label", "4"},
                                {"frames_per_recording", "6"},
                                {"radar.n_samples", "32"},
                                {"radar.n_chirps", "16"},
                                {"scene.min_range", "0.3"},
                                {"scene.max_range", "0.9"},
                                {"seed", "5"}});
    run_twice(cmd::synth, synth_cfg, root / "synth_a", root / "synth_b", {}, {}, o, "synth");

    const fs::path ds = root / "synth_a";
    const auto train_cfg = cfg({{"epochs", "2"},
                                {"feature_maps", "4"},
                                {"embedding_dim", "4"},
                                {"dml_kind", "lar"},
                                {"smoothing", "true"},
                                {"seed", "9"}});
    run_twice(cmd::train, train_cfg, root / "train_a", root / "train_b", ds, {}, o, "train");
    run_twice(cmd::evaluate, cfg({{"smoothing", "true"}, {"embeddings", "true"}}), root / "evaluate_a",
              root / "evaluate_b", ds, root / "train_a" / "model.larm", o, "evaluate");
    run_twice(cmd::ablation,
              cfg({{"epochs", "1"}, {"feature_maps", "4"}, {"embedding_dim", "4"}, {"constellation_k", "1"}, {"seeds", "1,2"}}),
              root / "ablation_a", root / "ablation_b", ds, {}, o, "ablation");
    if (o.pass) o.detail = "verify-geometry, synth, train, evaluate and ablation reruns are byte-identical";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    std::string work = (fs::temp_directory_path() / "lar_acceptance").string();
    app.add_option("--only", only, "criteria to run (1-8)")->check(CLI::Range(1, 8));
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "loss oracle equivalence", 10, loss_oracles},
        {2, "gradient correctness", 60, gradients},
        {3, "uniform configuration is optimal", 300, uniform_optimum},
        {4, "perturbation inequalities", 1, perturbation},
        {5, "radar pipeline physics", 30, radar_physics},
        {6, "smoothing closed form", 1, smoothing},
        {7, "directional ablation", 1800, ablation_ordering},
        {8, "reproducibility", 600, reproducibility},
    };

    bool all = true;
    for (const Criterion& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const fs::path dir = fs::path(work) / ("criterion" + std::to_string(c.id));
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(dir);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) o.fail("runtime " + fmt(seconds) + " s over budget " + fmt(c.budget_seconds) + " s");
        all = all && o.pass;
        std::printf("criterion %d %s %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
