#include "lar/trainer.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "lar/error.hpp"
#include "lar/smoothing.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace lar {

namespace {

constexpr std::array<unsigned char, 4> kCheckpointMagic{'L', 'A', 'R', 'M'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr int kEvalChunk = 64;

constexpr std::array<std::string_view, 16> kTrainKeys{
    "dml_kind",   "lambda_dml",  "lr",     "momentum", "clip_norm", "epochs",         "samples_per_label", "seed", "margin",
    "constellation_k", "multiplier_offset", "embedding_dim", "feature_maps", "smoothing", "alpha", "smooth_rounded",
};

LossKind loss_kind(DmlKind k) {
    switch (k) {
        case DmlKind::Triplet: return LossKind::Triplet;
        case DmlKind::McNPair: return LossKind::McNPair;
        case DmlKind::Constellation: return LossKind::Constellation;
        case DmlKind::LAR: return LossKind::LAR;
        case DmlKind::None: break;
    }
    throw Error(ErrorCode::InvalidArgument, "no metric loss selected");
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::vector<unsigned char> weight_bytes(std::span<const float> w) {
    std::vector<unsigned char> out;
    out.reserve(w.size() * 4);
    for (float v : w) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

std::vector<std::span<const float>> frame_spans(const Dataset& ds, const Recording& r, int first, int count) {
    std::vector<std::span<const float>> spans;
    spans.reserve(static_cast<std::size_t>(count));
    for (int f = first; f < first + count; ++f) spans.push_back(ds.frame(r, f));
    return spans;
}

void keep_heap_mapped() {
#ifdef __GLIBC__
    static const bool once = [] {
        mallopt(M_MMAP_THRESHOLD, 1 << 30);
        mallopt(M_TRIM_THRESHOLD, 1 << 30);
        return true;
    }();
    (void)once;
#endif
}

}  // namespace

std::string_view to_string(DmlKind kind) {
    switch (kind) {
        case DmlKind::None: return "none";
        case DmlKind::Triplet: return "triplet";
        case DmlKind::McNPair: return "mc_n_pair";
        case DmlKind::Constellation: return "constellation";
        case DmlKind::LAR: return "lar";
    }
    return "unknown";
}

DmlKind parse_dml_kind(std::string_view text) {
    for (DmlKind k : {DmlKind::None, DmlKind::Triplet, DmlKind::McNPair, DmlKind::Constellation, DmlKind::LAR}) {
        if (text == to_string(k)) return k;
    }
    throw Error(ErrorCode::Usage, "unknown dml_kind '" + std::string(text) +
                                      "' (expected none, triplet, mc_n_pair, constellation or lar)");
}

void TrainConfig::validate() const {
    if (!(lambda_dml >= 0.0) || !std::isfinite(lambda_dml)) {
        throw Error(ErrorCode::InvalidArgument, "lambda_dml must be finite and >= 0");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::InvalidArgument, "lr must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorCode::InvalidArgument, "momentum must be in [0, 1)");
    if (!(clip_norm >= 0.0) || !std::isfinite(clip_norm)) {
        throw Error(ErrorCode::InvalidArgument, "clip_norm must be finite and >= 0");
    }
    if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
    if (samples_per_label != 2) throw Error(ErrorCode::InvalidArgument, "samples_per_label must be 2");
    if (embedding_dim < 1 || feature_maps < 1) throw Error(ErrorCode::InvalidArgument, "network sizes must be >= 1");
    if (!(margin > 0.0)) throw Error(ErrorCode::InvalidArgument, "margin must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::BadAlpha, "alpha must be in (0, 1]");
}

DmlLossConfig TrainConfig::loss_config() const {
    DmlLossConfig c;
    c.kind = loss_kind(dml_kind);
    c.margin = margin;
    c.constellation_k = constellation_k;
    c.multiplier_offset = multiplier_offset;
    return c;
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& cfg) {
    TrainConfig t;
    t.dml_kind = parse_dml_kind(cfg.get_string("dml_kind", std::string(to_string(t.dml_kind))));
    t.lambda_dml = cfg.get_double("lambda_dml", t.lambda_dml);
    t.lr = cfg.get_double("lr", t.lr);
    t.momentum = cfg.get_double("momentum", t.momentum);
    t.clip_norm = cfg.get_double("clip_norm", t.clip_norm);
    t.epochs = static_cast<int>(cfg.get_int("epochs", t.epochs));
    t.samples_per_label = static_cast<int>(cfg.get_int("samples_per_label", t.samples_per_label));
    t.seed = cfg.get_uint("seed", t.seed);
    t.margin = cfg.get_double("margin", t.margin);
    t.constellation_k = static_cast<int>(cfg.get_int("constellation_k", t.constellation_k));
    t.multiplier_offset = cfg.get_double("multiplier_offset", t.multiplier_offset);
    t.embedding_dim = static_cast<int>(cfg.get_int("embedding_dim", t.embedding_dim));
    t.feature_maps = static_cast<int>(cfg.get_int("feature_maps", t.feature_maps));
    t.smoothing = cfg.get_bool("smoothing", t.smoothing);
    t.alpha = cfg.get_double("alpha", t.alpha);
    t.smooth_rounded = cfg.get_bool("smooth_rounded", t.smooth_rounded);
    return t;
}

KeyValueConfig TrainConfig::to_config() const {
    KeyValueConfig c;
    c.set("dml_kind", std::string(to_string(dml_kind)));
    c.set("lambda_dml", lambda_dml);
    c.set("lr", lr);
    c.set("momentum", momentum);
    c.set("clip_norm", clip_norm);
    c.set("epochs", epochs);
    c.set("samples_per_label", samples_per_label);
    c.set("seed", seed);
    c.set("margin", margin);
    c.set("constellation_k", constellation_k);
    c.set("multiplier_offset", multiplier_offset);
    c.set("embedding_dim", embedding_dim);
    c.set("feature_maps", feature_maps);
    c.set("smoothing", smoothing);
    c.set("alpha", alpha);
    c.set("smooth_rounded", smooth_rounded);
    return c;
}

std::span<const std::string_view> TrainConfig::known_keys() { return kTrainKeys; }

SmartBatcher::SmartBatcher(std::vector<int> labels, int num_labels, std::uint64_t seed)
    : num_labels_(num_labels), seed_(seed), by_label_(static_cast<std::size_t>(num_labels)),
      carry_(static_cast<std::size_t>(num_labels)) {
    if (num_labels < 2) throw Error(ErrorCode::InvalidArgument, "smart batches need at least two labels");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (l < 0 || l >= num_labels) {
            throw Error(ErrorCode::InvalidArgument, "sample " + std::to_string(i) + " has label out of range");
        }
        by_label_[static_cast<std::size_t>(l)].push_back(static_cast<int>(i));
    }
    for (int l = 0; l < num_labels; ++l) {
        if (by_label_[static_cast<std::size_t>(l)].size() < 2) {
            throw Error(ErrorCode::InsufficientLabelSamples,
                        "label " + std::to_string(l) + " has " +
                            std::to_string(by_label_[static_cast<std::size_t>(l)].size()) +
                            " training samples, need at least 2");
        }
    }
}

std::vector<std::vector<int>> SmartBatcher::next_epoch() {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(epoch_), 0xBA7C4u};
    std::mt19937_64 rng(seq);
    ++epoch_;
    std::vector<std::vector<int>> pools(static_cast<std::size_t>(num_labels_));
    std::size_t batches = SIZE_MAX;
    for (std::size_t l = 0; l < pools.size(); ++l) {
        auto& pool = pools[l];
        pool = std::move(carry_[l]);
        if (pool.size() < by_label_[l].size()) {
            std::vector<int> fresh = by_label_[l];
            std::shuffle(fresh.begin(), fresh.end(), rng);
            pool.insert(pool.end(), fresh.begin(), fresh.end());
        }
        batches = std::min(batches, pool.size() / 2);
    }
    std::vector<std::vector<int>> out(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        out[b].reserve(2 * pools.size());
        for (const auto& pool : pools) {
            out[b].push_back(pool[2 * b]);
            out[b].push_back(pool[2 * b + 1]);
        }
    }
    for (std::size_t l = 0; l < pools.size(); ++l) {
        carry_[l].assign(pools[l].begin() + static_cast<std::ptrdiff_t>(2 * batches), pools[l].end());
    }
    return out;
}

std::size_t SmartBatcher::carried() const {
    std::size_t n = 0;
    for (const auto& c : carry_) n += c.size();
    return n;
}

std::uint64_t Model::checksum() const {
    Fnv1a h;
    h.update(weight_bytes(net.parameters()));
    return h.value();
}

NetworkConfig network_for(const Dataset& ds, const TrainConfig& config) {
    NetworkConfig n;
    n.channels = ds.channels;
    n.height = ds.height;
    n.width = ds.width;
    n.feature_maps = config.feature_maps;
    n.embedding_dim = config.embedding_dim;
    return n;
}

Model make_model(const Dataset& ds, const TrainConfig& config) {
    Model m(network_for(ds, config), ds.num_labels);
    m.net.initialize(config.seed, 0.5 * (ds.num_labels - 1));
    return m;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
    std::vector<unsigned char> out;
    for (unsigned char m : kCheckpointMagic) out.push_back(m);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(model.num_labels));
    const NetworkConfig& n = model.network;
    for (int v : {n.channels, n.height, n.width, n.stages, n.feature_maps, n.kernel, n.embedding_dim}) {
        put_u32(out, static_cast<std::uint32_t>(v));
    }
    put_u64(out, model.net.parameters().size());
    const auto w = weight_bytes(model.net.parameters());
    out.insert(out.end(), w.begin(), w.end());
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error(ErrorCode::Io, "cannot write checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open checkpoint " + path.string());
    const std::vector<unsigned char> b((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    constexpr std::size_t header = 4 + 4 + 4 + 7 * 4 + 8;
    if (b.size() < header || !std::equal(kCheckpointMagic.begin(), kCheckpointMagic.end(), b.begin())) {
        throw Error(ErrorCode::Parse, path.string() + ": not a LARM checkpoint");
    }
    if (get_le(&b[4], 4) != kCheckpointVersion) throw Error(ErrorCode::Parse, path.string() + ": unsupported version");
    const int labels = static_cast<int>(get_le(&b[8], 4));
    NetworkConfig n;
    int* fields[] = {&n.channels, &n.height, &n.width, &n.stages, &n.feature_maps, &n.kernel, &n.embedding_dim};
    for (int i = 0; i < 7; ++i) *fields[i] = static_cast<int>(get_le(&b[12 + 4 * static_cast<std::size_t>(i)], 4));
    const std::uint64_t count = get_le(&b[40], 8);
    try {
        n.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
    }
    if (labels < 2 || count != n.parameter_count() || b.size() != header + 4 * count) {
        throw Error(ErrorCode::Parse, path.string() + ": header does not match weight data");
    }
    Model m(n, labels);
    auto& p = m.net.parameters();
    for (std::size_t i = 0; i < count; ++i) {
        p[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(&b[header + 4 * i], 4)));
    }
    return m;
}

template <typename T>
StepTerms combined_objective(const typename ConvNet<T>::Output& out, std::span<const int> labels, int num_labels,
                             const TrainConfig& config, typename ConvNet<T>::Vector& d_predictions,
                             typename ConvNet<T>::Matrix& d_embeddings) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (out.predictions.size() != n) throw Error(ErrorCode::ShapeMismatch, "labels do not match the batch");
    StepTerms terms;
    d_predictions.resize(n);
    double mse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double err = static_cast<double>(out.predictions(i)) - labels[static_cast<std::size_t>(i)];
        mse += err * err;
        d_predictions(i) = static_cast<T>(2.0 * err / static_cast<double>(n));
    }
    terms.mse_term = mse / static_cast<double>(n);

    d_embeddings.setZero(n, out.embeddings.cols());
    if (config.dml_kind == DmlKind::None || config.lambda_dml == 0.0) return terms;
    EmbeddingBatch batch;
    batch.vectors = out.embeddings.template cast<double>();
    batch.labels.assign(labels.begin(), labels.end());
    batch.num_labels = num_labels;
    const LossOutput loss = dml_loss(batch, config.loss_config());
    terms.dml_term = loss.value;
    d_embeddings = (config.lambda_dml * loss.grads).template cast<T>();
    return terms;
}

template StepTerms combined_objective<float>(const ConvNet<float>::Output&, std::span<const int>, int,
                                             const TrainConfig&, ConvNet<float>::Vector&, ConvNet<float>::Matrix&);
template StepTerms combined_objective<double>(const ConvNet<double>::Output&, std::span<const int>, int,
                                              const TrainConfig&, ConvNet<double>::Vector&, ConvNet<double>::Matrix&);

Trainer::Trainer(Model& model, const TrainConfig& config) : model_(model), config_(config) {
    config_.validate();
    velocity_.assign(model_.net.parameters().size(), 0.0f);
}

StepTerms Trainer::step(std::span<const std::span<const float>> inputs, std::span<const int> labels, int epoch,
                        int batch_index) {
    const auto out = model_.net.forward(inputs, true);
    ConvNet<float>::Vector d_pred;
    ConvNet<float>::Matrix d_emb;
    const StepTerms terms = combined_objective<float>(out, labels, model_.num_labels, config_, d_pred, d_emb);
    const auto where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
    if (!std::isfinite(terms.mse_term) || !std::isfinite(terms.dml_term)) {
        throw Error(ErrorCode::NonFiniteLoss, "non-finite loss at " + where);
    }
    grad_.assign(velocity_.size(), 0.0f);
    model_.net.backward(out, d_pred, d_emb, grad_);
    double sq = 0.0;
    for (float g : grad_) sq += static_cast<double>(g) * g;
    if (!std::isfinite(sq)) throw Error(ErrorCode::NonFiniteLoss, "non-finite gradient at " + where);
    if (config_.clip_norm > 0.0 && sq > config_.clip_norm * config_.clip_norm) {
        const auto scale = static_cast<float>(config_.clip_norm / std::sqrt(sq));
        for (float& g : grad_) g *= scale;
    }
    auto& params = model_.net.parameters();
    const auto mu = static_cast<float>(config_.momentum);
    const auto lr = static_cast<float>(config_.lr);
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity_[i] = mu * velocity_[i] + grad_[i];
        params[i] -= lr * velocity_[i];
    }
    return terms;
}

int round_count(double raw, int num_labels) {
    if (std::isnan(raw)) return 0;
    const double r = std::round(raw);
    return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(num_labels - 1)));
}

std::vector<int> predict_counts(std::span<const double> raw, int num_labels, const EvalOptions& options) {
    std::vector<int> out;
    out.reserve(raw.size());
    if (!options.smoothing) {
        for (double x : raw) out.push_back(round_count(x, num_labels));
        return out;
    }
    SmoothingState state(options.alpha);
    for (double x : raw) {
        const double input = options.smooth_rounded ? static_cast<double>(round_count(x, num_labels)) : x;
        out.push_back(round_count(state.update(input), num_labels));
    }
    return out;
}

MetricsReport compute_metrics(std::span<const int> labels, std::span<const int> predictions, int num_labels) {
    if (labels.empty()) throw Error(ErrorCode::EmptySplit, "no samples to evaluate");
    if (labels.size() != predictions.size()) throw Error(ErrorCode::ShapeMismatch, "labels and predictions differ");
    MetricsReport m;
    m.samples = labels.size();
    m.confusion.assign(static_cast<std::size_t>(num_labels), std::vector<long>(static_cast<std::size_t>(num_labels), 0));
    std::size_t exact = 0;
    std::size_t near = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int d = std::abs(predictions[i] - labels[i]);
        exact += d == 0;
        near += d <= 1;
        if (labels[i] >= 0 && labels[i] < num_labels && predictions[i] >= 0 && predictions[i] < num_labels) {
            ++m.confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predictions[i])];
        }
    }
    m.accuracy = static_cast<double>(exact) / static_cast<double>(m.samples);
    m.accuracy_pm1 = static_cast<double>(near) / static_cast<double>(m.samples);
    return m;
}

RawPredictions raw_predictions(const Model& model, const Dataset& ds, Split split) {
    keep_heap_mapped();
    RawPredictions out;
    for (const Recording& r : ds.recordings) {
        if (r.split != split) continue;
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(r.n_frames));
        for (int first = 0; first < r.n_frames; first += kEvalChunk) {
            const int count = std::min(kEvalChunk, r.n_frames - first);
            const auto spans = frame_spans(ds, r, first, count);
            const auto o = model.net.forward(spans, false);
            for (Eigen::Index i = 0; i < o.predictions.size(); ++i) values.push_back(o.predictions(i));
        }
        out.recording_labels.push_back(r.label);
        out.values.push_back(std::move(values));
    }
    return out;
}

MetricsReport evaluate_raw(const RawPredictions& raw, int num_labels, const EvalOptions& options) {
    std::vector<int> labels;
    std::vector<int> preds;
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        const auto counts = predict_counts(raw.values[i], num_labels, options);
        preds.insert(preds.end(), counts.begin(), counts.end());
        labels.insert(labels.end(), counts.size(), raw.recording_labels[i]);
    }
    return compute_metrics(labels, preds, num_labels);
}

MetricsReport evaluate(const Model& model, const Dataset& ds, Split split, const EvalOptions& options) {
    if (ds.frame_count(split) == 0) {
        throw Error(ErrorCode::EmptySplit, std::string(to_string(split)) + " split has no frames");
    }
    return evaluate_raw(raw_predictions(model, ds, split), ds.num_labels, options);
}

std::string TrainReport::csv() const {
    std::string out = "epoch,mse_term,dml_term,test_acc,test_acc_pm1\n";
    for (const EpochRow& r : epochs) {
        out += std::to_string(r.epoch) + ',' + format_double(r.mse_term) + ',' + format_double(r.dml_term) + ',' +
               format_double(r.test_acc) + ',' + format_double(r.test_acc_pm1) + '\n';
    }
    return out;
}

TrainReport train(Model& model, const Dataset& ds, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    keep_heap_mapped();
    if (!ds.standardized) throw Error(ErrorCode::InvalidArgument, "training expects a standardized dataset");
    if (model.num_labels != ds.num_labels) throw Error(ErrorCode::ShapeMismatch, "model and dataset label counts differ");
    const auto start = std::chrono::steady_clock::now();

    std::vector<SampleRef> samples;
    std::vector<int> labels;
    for (std::size_t i = 0; i < ds.recordings.size(); ++i) {
        const Recording& r = ds.recordings[i];
        if (r.split != Split::Train) continue;
        for (int f = 0; f < r.n_frames; ++f) {
            samples.push_back({static_cast<int>(i), f});
            labels.push_back(r.label);
        }
    }
    SmartBatcher batcher(labels, ds.num_labels, config.seed);
    Trainer trainer(model, config);
    const EvalOptions eval{config.smoothing, config.alpha, config.smooth_rounded};

    TrainReport report;
    std::vector<std::span<const float>> inputs;
    std::vector<int> batch_labels;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto batches = batcher.next_epoch();
        EpochRow row;
        row.epoch = epoch;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            inputs.clear();
            batch_labels.clear();
            for (int idx : batches[b]) {
                const SampleRef& s = samples[static_cast<std::size_t>(idx)];
                inputs.push_back(ds.frame(ds.recordings[static_cast<std::size_t>(s.recording)], s.frame));
                batch_labels.push_back(labels[static_cast<std::size_t>(idx)]);
            }
            const StepTerms t = trainer.step(inputs, batch_labels, epoch, static_cast<int>(b));
            row.mse_term += t.mse_term;
            row.dml_term += t.dml_term;
        }
        if (!batches.empty()) {
            row.mse_term /= static_cast<double>(batches.size());
            row.dml_term /= static_cast<double>(batches.size());
        }
        const MetricsReport m = evaluate(model, ds, Split::Test, eval);
        row.test_acc = m.accuracy;
        row.test_acc_pm1 = m.accuracy_pm1;
        report.epochs.push_back(row);
        if (on_epoch) on_epoch(row);
    }
    report.model_checksum = model.checksum();
    report.carried_samples = batcher.carried();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string embedding_csv(const Model& model, const Dataset& ds, Split split) {
    std::ostringstream out;
    out << "sample_id,label";
    for (int d = 0; d < model.network.embedding_dim; ++d) out << ",e_" << d;
    out << '\n';
    long sample_id = 0;
    for (const Recording& r : ds.recordings) {
        if (r.split != split) continue;
        for (int first = 0; first < r.n_frames; first += kEvalChunk) {
            const int count = std::min(kEvalChunk, r.n_frames - first);
            const auto o = model.net.forward(frame_spans(ds, r, first, count), false);
            const Matrix e = normalize(o.embeddings.cast<double>());
            for (Eigen::Index i = 0; i < e.rows(); ++i) {
                out << sample_id++ << ',' << r.label;
                for (Eigen::Index d = 0; d < e.cols(); ++d) out << ',' << format_double(e(i, d));
                out << '\n';
            }
        }
    }
    return out.str();
}

std::string confusion_csv(const MetricsReport& report) {
    std::string out = "label";
    for (std::size_t p = 0; p < report.confusion.size(); ++p) out += ",pred_" + std::to_string(p);
    out += '\n';
    for (std::size_t l = 0; l < report.confusion.size(); ++l) {
        out += std::to_string(l);
        for (long c : report.confusion[l]) out += ',' + std::to_string(c);
        out += '\n';
    }
    return out;
}

}  // namespace lar
