#include "lar/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "lar/dataset.hpp"
#include "lar/geometry.hpp"
#include "lar/trainer.hpp"

#ifndef LAR_VERSION
#define LAR_VERSION "0.0.0"
#endif

namespace lar::cmd {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<std::string_view, 17> kVerifyKeys{
    "perturbation_l_min",
    "l_min",  "l_max",    "dim",           "seeds",  "seed",     "random_samples", "steps",
    "lr",     "restarts", "multiplier_offset", "gap_tolerance", "perturbation_l_max", "epsilons",
    "epsilon_fractions", "jensen", "points",
};

constexpr std::array<std::string_view, 6> kEvaluateKeys{"smoothing", "alpha",  "smooth_rounded",
                                                        "split",     "seed",   "embeddings"};

constexpr std::array<std::string_view, 5> kSettings{"none", "triplet", "mc_n_pair", "constellation", "lar"};
constexpr std::array<std::string_view, 5> kSettingNames{"MSE", "MSE + Triplet", "MSE + Mc-N-Pair",
                                                        "MSE + Constellation", "MSE + LAR"};

std::vector<std::string_view> synth_keys() {
    std::vector<std::string_view> keys;
    for (std::string_view k : SynthOptions::known_keys()) {
        if (!k.starts_with("stats.")) keys.push_back(k);
    }
    return keys;
}

std::vector<std::string_view> ablation_keys() {
    std::vector<std::string_view> keys;
    for (std::string_view k : TrainConfig::known_keys()) {
        if (k != "dml_kind" && k != "smoothing") keys.push_back(k);
    }
    keys.push_back("seeds");
    return keys;
}

const std::vector<std::string_view>& cached_synth_keys() {
    static const auto keys = synth_keys();
    return keys;
}

const std::vector<std::string_view>& cached_ablation_keys() {
    static const auto keys = ablation_keys();
    return keys;
}

void log(const Invocation& in, const std::string& line) {
    if (in.log) in.log(line);
}

void ensure_dir(const std::filesystem::path& dir) {
    if (dir.empty()) throw Error(ErrorCode::Usage, "an output directory is required");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::vector<double> parse_doubles(const KeyValueConfig& cfg, const std::string& key, const std::string& fallback) {
    std::vector<double> out;
    std::istringstream in(cfg.get_string(key, fallback));
    std::string item;
    while (std::getline(in, item, ',')) {
        KeyValueConfig one;
        one.set(key, item);
        out.push_back(one.get_double(key, 0.0));
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        KeyValueConfig one;
        one.set("seeds", item);
        out.push_back(one.get_uint("seeds", 0));
    }
    if (out.empty()) throw Error(ErrorCode::Usage, "seed list is empty");
    return out;
}

class Manifest {
public:
    Manifest(std::string_view command, const Invocation& in) : start_(Clock::now()) {
        kv_.set("command", std::string(command));
        kv_.set("code_version", std::string(version()));
        kv_.set("output", in.out_dir.string());
        if (!in.dataset.empty()) kv_.set("input.dataset", in.dataset.string());
        if (!in.checkpoint.empty()) kv_.set("input.checkpoint", in.checkpoint.string());
        for (const auto& [k, v] : in.config.entries()) kv_.set("config." + k, v);
    }
    void set(const std::string& key, const std::string& value) { kv_.set(key, value); }
    void write(const std::filesystem::path& dir) {
        kv_.set("wall_clock_seconds", std::chrono::duration<double>(Clock::now() - start_).count());
        kv_.save(dir / "manifest.txt");
    }

private:
    KeyValueConfig kv_;
    Clock::time_point start_;
};

Dataset load_standardized(const Invocation& in, Manifest& manifest) {
    if (in.dataset.empty()) throw Error(ErrorCode::Usage, "a dataset directory is required");
    Dataset ds = read_dataset(in.dataset);
    manifest.set("dataset_checksum", hex64(dataset_checksum(ds)));
    standardize(ds);
    return ds;
}

std::string metrics_row(std::string_view split, bool smoothing, const MetricsReport& m) {
    return std::string(split) + ',' + (smoothing ? "true" : "false") + ',' + format_double(m.accuracy) + ',' +
           format_double(m.accuracy_pm1) + ',' + std::to_string(m.samples) + '\n';
}

constexpr std::string_view kMetricsHeader = "split,smoothing,accuracy,accuracy_pm1,samples\n";

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view version() { return LAR_VERSION; }

std::span<const std::string_view> known_keys(std::string_view command) {
    if (command == "verify-geometry") return kVerifyKeys;
    if (command == "synth") return cached_synth_keys();
    if (command == "train") return TrainConfig::known_keys();
    if (command == "evaluate") return kEvaluateKeys;
    if (command == "ablation") return cached_ablation_keys();
    throw Error(ErrorCode::Usage, "unknown command '" + std::string(command) + "'");
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::VerificationFailed: return 2;
        case ErrorCode::NonFinite:
        case ErrorCode::NonFiniteLoss: return 3;
        default: return 1;
    }
}

void verify_geometry(const Invocation& in) {
    const KeyValueConfig& cfg = in.config;
    cfg.require_known(kVerifyKeys);
    Manifest manifest("verify-geometry", in);
    const int l_min = static_cast<int>(cfg.get_int("l_min", 3));
    const int l_max = static_cast<int>(cfg.get_int("l_max", 8));
    const int dim = static_cast<int>(cfg.get_int("dim", 2));
    const int n_seeds = static_cast<int>(cfg.get_int("seeds", 10));
    const std::uint64_t seed = cfg.get_uint("seed", 1);
    const int samples = static_cast<int>(cfg.get_int("random_samples", 10000));
    OptimizerOptions opt;
    opt.steps = static_cast<int>(cfg.get_int("steps", opt.steps));
    opt.lr = cfg.get_double("lr", opt.lr);
    opt.restarts = static_cast<int>(cfg.get_int("restarts", opt.restarts));
    opt.multiplier_offset = cfg.get_double("multiplier_offset", 0.0);
    const double tolerance = cfg.get_double("gap_tolerance", 0.05);
    const int p_min = static_cast<int>(cfg.get_int("perturbation_l_min", 3));
    const int p_max = static_cast<int>(cfg.get_int("perturbation_l_max", 12));
    const bool write_points = cfg.get_bool("points", true);
    const bool run_jensen = cfg.get_bool("jensen", true);

    if (l_min < 2 || l_max < l_min) {
        throw Error(ErrorCode::Usage, "empty or invalid label range [" + std::to_string(l_min) + ", " +
                                          std::to_string(l_max) + "]");
    }
    if (dim != 2) throw Error(ErrorCode::Usage, "angle analysis needs dim = 2");
    if (n_seeds < 1 || samples < 0 || opt.steps < 1 || opt.restarts < 1) {
        throw Error(ErrorCode::Usage, "seeds, steps and restarts must be >= 1 and random_samples >= 0");
    }
    std::vector<EpsilonSpec> eps;
    for (double e : parse_doubles(cfg, "epsilons", "0.01,0.1,0.5")) eps.push_back({e, false});
    for (double f : parse_doubles(cfg, "epsilon_fractions", "0.9")) eps.push_back({f, true});
    // Validate the epsilon grid before any long-running work.
    if (p_min < 3 || p_max < p_min) {
        throw Error(ErrorCode::Usage, "perturbation range must satisfy 3 <= perturbation_l_min <= perturbation_l_max");
    }
    std::vector<InequalityRow> rows;
    for (const InequalityRow& r : perturbation_inequality_check(p_max, eps)) {
        if (r.l >= p_min) rows.push_back(r);
    }

    ensure_dir(in.out_dir);
    std::vector<std::string> failures;

    std::string opt_csv = "L,seed,objective,uniform_objective,max_gap_deviation,ranking_preserved,pass\n";
    if (write_points) ensure_dir(in.out_dir / "points");
    for (int l = l_min; l <= l_max; ++l) {
        const double uniform = class_objective(uniform_configuration(l), opt.multiplier_offset);
        int passed = 0;
        for (int s = 0; s < n_seeds; ++s) {
            const std::uint64_t sd = seed + static_cast<std::uint64_t>(s);
            const ClassConfiguration c = optimize_configuration(l, dim, sd, opt);
            const GeometryReport r = measure_angles(c, opt.multiplier_offset);
            const bool pass = r.max_gap_deviation <= tolerance && r.ranking_preserved;
            passed += pass;
            opt_csv += std::to_string(l) + ',' + std::to_string(sd) + ',' + format_double(r.objective_value) + ',' +
                       format_double(uniform) + ',' + format_double(r.max_gap_deviation) + ',' +
                       (r.ranking_preserved ? "true" : "false") + ',' + (pass ? "true" : "false") + '\n';
            if (write_points) {
                std::string pts = "label,x,y\n";
                for (int i = 0; i < l; ++i) {
                    pts += std::to_string(i) + ',' + format_double(c.points(i, 0)) + ',' + format_double(c.points(i, 1)) +
                           '\n';
                }
                write_text(in.out_dir / "points" / ("L" + std::to_string(l) + "_seed" + std::to_string(sd) + ".csv"),
                           pts);
            }
        }
        log(in, "optimization L=" + std::to_string(l) + ": " + std::to_string(passed) + "/" + std::to_string(n_seeds) +
                    " seeds within " + format_double(tolerance) + " rad with ranking preserved");
        if (passed != n_seeds) failures.push_back("optimization L=" + std::to_string(l));
    }
    write_text(in.out_dir / "optimization.csv", opt_csv);

    std::string random_csv = "L,samples,not_beaten,pass\n";
    for (int l = l_min; l <= l_max; ++l) {
        const int not_beaten =
            count_configurations_not_beaten(l, dim, samples, seed + 1000003ULL * static_cast<std::uint64_t>(l),
                                            opt.multiplier_offset);
        random_csv += std::to_string(l) + ',' + std::to_string(samples) + ',' + std::to_string(not_beaten) + ',' +
                      (not_beaten == 0 ? "true" : "false") + '\n';
        log(in, "uniform vs random L=" + std::to_string(l) + ": " + std::to_string(not_beaten) + "/" +
                    std::to_string(samples) + " random configurations not beaten");
        if (not_beaten != 0) failures.push_back("uniform-vs-random L=" + std::to_string(l));
    }
    write_text(in.out_dir / "uniform_vs_random.csv", random_csv);

    std::string main_csv = "l,epsilon,lhs,rhs,holds\n";
    std::string reduced_csv = "l,epsilon,lhs,rhs,holds\n";
    int failed_rows = 0;
    for (const InequalityRow& r : rows) {
        const std::string line = std::to_string(r.l) + ',' + format_double(r.epsilon) + ',' + format_double(r.lhs) +
                                 ',' + format_double(r.rhs) + ',' + (r.holds ? "true" : "false") + '\n';
        if (r.form == InequalityForm::EvenReduced) {
            reduced_csv += line;
        } else {
            main_csv += line;
        }
        if (!r.holds) {
            ++failed_rows;
            failures.push_back("perturbation l=" + std::to_string(r.l) + " eps=" + format_double(r.epsilon) + " (" +
                               to_string(r.form) + ")");
        }
    }
    write_text(in.out_dir / "perturbation.csv", main_csv);
    write_text(in.out_dir / "perturbation_reduced.csv", reduced_csv);
    log(in, "perturbation inequalities: " + std::to_string(rows.size() - static_cast<std::size_t>(failed_rows)) + "/" +
                std::to_string(rows.size()) + " rows hold");

    if (run_jensen) {
        std::string jensen_csv = "L,mean_exp_cos,exp_mean_cos,holds\n";
        for (int l = l_min; l <= l_max; ++l) {
            std::vector<double> angles;
            for (int k = 1; k < l; ++k) angles.push_back(2.0 * std::numbers::pi * k / l);
            const auto [lhs, rhs] = jensen_gap(angles);
            const bool holds = lhs >= rhs;
            jensen_csv += std::to_string(l) + ',' + format_double(lhs) + ',' + format_double(rhs) + ',' +
                          (holds ? "true" : "false") + '\n';
            if (!holds) failures.push_back("jensen L=" + std::to_string(l));
        }
        write_text(in.out_dir / "jensen.csv", jensen_csv);
    }

    manifest.set("seed", std::to_string(seed));
    manifest.set("checks_failed", std::to_string(failures.size()));
    manifest.write(in.out_dir);
    if (!failures.empty()) {
        std::string msg = std::to_string(failures.size()) + " geometry check(s) failed: " + failures.front();
        for (std::size_t i = 1; i < std::min<std::size_t>(failures.size(), 8); ++i) msg += "; " + failures[i];
        if (failures.size() > 8) msg += "; ...";
        throw Error(ErrorCode::VerificationFailed, msg);
    }
}

void synth(const Invocation& in) {
    in.config.require_known(cached_synth_keys());
    Manifest manifest("synth", in);
    const SynthOptions options = SynthOptions::from_config(in.config);
    options.validate();
    ensure_dir(in.out_dir);
    log(in, "synthesizing " + std::to_string(options.num_labels * options.recordings_per_label) + " recordings of " +
                std::to_string(options.frames_per_recording) + " frames");
    const Dataset ds = synth_dataset(options);
    write_dataset(ds, in.out_dir);
    const std::string checksum = hex64(dataset_checksum(ds));
    log(in, "dataset checksum " + checksum);
    manifest.set("seed", std::to_string(options.seed));
    manifest.set("dataset_checksum", checksum);
    manifest.write(in.out_dir);
}

void train(const Invocation& in) {
    in.config.require_known(TrainConfig::known_keys());
    Manifest manifest("train", in);
    const TrainConfig config = TrainConfig::from_config(in.config);
    config.validate();
    const Dataset ds = load_standardized(in, manifest);
    ensure_dir(in.out_dir);
    Model model = make_model(ds, config);
    log(in, "training " + std::string(to_string(config.dml_kind)) + " for " + std::to_string(config.epochs) +
                " epochs on " + std::to_string(ds.frame_count(Split::Train)) + " frames");
    const TrainReport report = train(model, ds, config, [&](const EpochRow& r) {
        log(in, "epoch " + std::to_string(r.epoch) + " mse " + format_double(r.mse_term) + " dml " +
                    format_double(r.dml_term) + " test_acc " + format_double(r.test_acc) + " test_acc_pm1 " +
                    format_double(r.test_acc_pm1));
    });
    write_text(in.out_dir / "train_report.csv", report.csv());
    save_checkpoint(model, in.out_dir / "model.larm");
    write_text(in.out_dir / "embeddings.csv", embedding_csv(model, ds, Split::Test));

    const RawPredictions raw = raw_predictions(model, ds, Split::Test);
    const MetricsReport plain = evaluate_raw(raw, ds.num_labels, {false, config.alpha, config.smooth_rounded});
    const MetricsReport smooth = evaluate_raw(raw, ds.num_labels, {true, config.alpha, config.smooth_rounded});
    write_text(in.out_dir / "metrics.csv",
               std::string(kMetricsHeader) + metrics_row("test", false, plain) + metrics_row("test", true, smooth));
    write_text(in.out_dir / "confusion.csv", confusion_csv(config.smoothing ? smooth : plain));

    manifest.set("seed", std::to_string(config.seed));
    manifest.set("model_checksum", hex64(report.model_checksum));
    manifest.set("carried_samples", std::to_string(report.carried_samples));
    manifest.write(in.out_dir);
}

void evaluate(const Invocation& in) {
    in.config.require_known(kEvaluateKeys);
    Manifest manifest("evaluate", in);
    if (in.checkpoint.empty()) throw Error(ErrorCode::Usage, "a checkpoint path is required");
    const KeyValueConfig& cfg = in.config;
    EvalOptions options;
    options.smoothing = cfg.get_bool("smoothing", false);
    options.alpha = cfg.get_double("alpha", options.alpha);
    options.smooth_rounded = cfg.get_bool("smooth_rounded", false);
    if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw Error(ErrorCode::BadAlpha, "alpha must be in (0, 1]");
    const std::string split_name = cfg.get_string("split", "test");
    if (split_name != "test" && split_name != "train") {
        throw Error(ErrorCode::Usage, "split must be train or test, got '" + split_name + "'");
    }
    const Split split = split_name == "test" ? Split::Test : Split::Train;

    const Model model = load_checkpoint(in.checkpoint);
    const Dataset ds = load_standardized(in, manifest);
    if (model.num_labels != ds.num_labels || model.network.channels != ds.channels ||
        model.network.height != ds.height || model.network.width != ds.width) {
        throw Error(ErrorCode::ShapeMismatch, "checkpoint shape does not match the dataset");
    }
    if (ds.frame_count(split) == 0) throw Error(ErrorCode::EmptySplit, split_name + " split has no frames");
    ensure_dir(in.out_dir);

    const RawPredictions raw = raw_predictions(model, ds, split);
    const MetricsReport m = evaluate_raw(raw, ds.num_labels, options);
    write_text(in.out_dir / "metrics.csv", std::string(kMetricsHeader) + metrics_row(split_name, options.smoothing, m));
    write_text(in.out_dir / "confusion.csv", confusion_csv(m));

    std::string pred_csv = "recording_id,frame,label,raw,prediction\n";
    std::size_t k = 0;
    for (const Recording& r : ds.recordings) {
        if (r.split != split) continue;
        const auto counts = predict_counts(raw.values[k], ds.num_labels, options);
        for (int f = 0; f < r.n_frames; ++f) {
            pred_csv += std::to_string(r.id) + ',' + std::to_string(f) + ',' + std::to_string(r.label) + ',' +
                        format_double(raw.values[k][static_cast<std::size_t>(f)]) + ',' +
                        std::to_string(counts[static_cast<std::size_t>(f)]) + '\n';
        }
        ++k;
    }
    write_text(in.out_dir / "predictions.csv", pred_csv);
    if (cfg.get_bool("embeddings", false)) write_text(in.out_dir / "embeddings.csv", embedding_csv(model, ds, split));
    log(in, split_name + " accuracy " + format_double(m.accuracy) + " accuracy_pm1 " + format_double(m.accuracy_pm1));
    manifest.set("model_checksum", hex64(model.checksum()));
    manifest.write(in.out_dir);
}

void ablation(const Invocation& in) {
    in.config.require_known(cached_ablation_keys());
    Manifest manifest("ablation", in);
    KeyValueConfig base_cfg = in.config;
    std::string seeds_text = base_cfg.get_string("seeds", "");
    if (seeds_text.empty()) seeds_text = base_cfg.has("seed") ? base_cfg.get_string("seed", "1") : "1,2,3";
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
    KeyValueConfig train_cfg;
    for (const auto& [k, v] : base_cfg.entries()) {
        if (k != "seeds" && k != "seed") train_cfg.set(k, v);
    }
    const TrainConfig base = TrainConfig::from_config(train_cfg);
    base.validate();
    const Dataset ds = load_standardized(in, manifest);
    ensure_dir(in.out_dir);
    ensure_dir(in.out_dir / "cells");

    struct Cell {
        bool ok = false;
        MetricsReport plain;
        MetricsReport smooth;
        std::string error;
    };
    // cells[setting][seed]
    std::vector<std::vector<Cell>> cells(kSettings.size(), std::vector<Cell>(seeds.size()));
    std::optional<Error> first_error;
    for (std::size_t s = 0; s < kSettings.size(); ++s) {
        for (std::size_t k = 0; k < seeds.size(); ++k) {
            TrainConfig cfg = base;
            cfg.dml_kind = parse_dml_kind(kSettings[s]);
            cfg.seed = seeds[k];
            cfg.smoothing = false;
            Cell& cell = cells[s][k];
            const auto start = Clock::now();
            try {
                Model model = make_model(ds, cfg);
                const TrainReport report = train(model, ds, cfg);
                const RawPredictions raw = raw_predictions(model, ds, Split::Test);
                cell.plain = evaluate_raw(raw, ds.num_labels, {false, cfg.alpha, cfg.smooth_rounded});
                cell.smooth = evaluate_raw(raw, ds.num_labels, {true, cfg.alpha, cfg.smooth_rounded});
                cell.ok = true;
                write_text(in.out_dir / "cells" /
                               (std::string(kSettings[s]) + "_seed" + std::to_string(seeds[k]) + "_train_report.csv"),
                           report.csv());
            } catch (const Error& e) {
                cell.error = std::string(to_string(e.code()));
                if (!first_error) first_error = e;
            }
            const double secs = std::chrono::duration<double>(Clock::now() - start).count();
            log(in, std::string(kSettingNames[s]) + " seed " + std::to_string(seeds[k]) + ": " +
                        (cell.ok ? "accuracy " + format_double(cell.plain.accuracy) + " / ES " +
                                       format_double(cell.smooth.accuracy)
                                 : "failed (" + cell.error + ")") +
                        " [" + std::to_string(static_cast<int>(secs)) + " s]");
        }
    }

    std::string table = "loss,es,seed,accuracy,accuracy_pm1,status\n";
    std::string summary = "setting,loss,es,accuracy,accuracy_pm1,seeds_ok\n";
    for (int es = 0; es < 2; ++es) {
        for (std::size_t s = 0; s < kSettings.size(); ++s) {
            std::vector<double> acc;
            std::vector<double> pm1;
            for (std::size_t k = 0; k < seeds.size(); ++k) {
                const Cell& cell = cells[s][k];
                table += std::string(kSettings[s]) + ',' + (es ? "true" : "false") + ',' + std::to_string(seeds[k]) + ',';
                if (cell.ok) {
                    const MetricsReport& m = es ? cell.smooth : cell.plain;
                    table += format_double(m.accuracy) + ',' + format_double(m.accuracy_pm1) + ",ok\n";
                    acc.push_back(m.accuracy);
                    pm1.push_back(m.accuracy_pm1);
                } else {
                    table += ",,failed:" + cell.error + '\n';
                }
            }
            summary += std::string(kSettingNames[s]) + (es ? " + ES" : "") + ',' + std::string(kSettings[s]) + ',' +
                       (es ? "true" : "false") + ',' + (acc.empty() ? "" : format_double(median(acc))) + ',' +
                       (pm1.empty() ? "" : format_double(median(pm1))) + ',' + std::to_string(acc.size()) + '\n';
        }
    }
    write_text(in.out_dir / "ablation_table.csv", table);
    write_text(in.out_dir / "ablation_summary.csv", summary);
    manifest.set("seed", seeds_text);
    manifest.write(in.out_dir);
    if (first_error) throw *first_error;
}

}  // namespace lar::cmd
