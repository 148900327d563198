#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lar/config.hpp"
#include "lar/dataset.hpp"
#include "lar/losses.hpp"
#include "lar/network.hpp"

namespace lar {

enum class DmlKind { None, Triplet, McNPair, Constellation, LAR };
std::string_view to_string(DmlKind kind);
/// Accepts none, triplet, mc_n_pair, constellation, lar. Throws Usage.
DmlKind parse_dml_kind(std::string_view text);

struct TrainConfig {
    DmlKind dml_kind = DmlKind::None;
    double lambda_dml = 1.0;
    double lr = 1e-4;
    double momentum = 0.9;
    /// Rescales the gradient to this L2 norm when it is larger; 0 disables.
    double clip_norm = 50.0;
    int epochs = 10;
    int samples_per_label = 2;
    std::uint64_t seed = 1;
    double margin = 1.0;
    int constellation_k = 3;
    double multiplier_offset = 0.0;
    int embedding_dim = 16;
    int feature_maps = 32;
    /// Exponential smoothing during per-epoch evaluation.
    bool smoothing = false;
    double alpha = 0.3;
    /// Smooth rounded counts instead of raw regression outputs.
    bool smooth_rounded = false;

    /// Throws InvalidArgument.
    void validate() const;
    DmlLossConfig loss_config() const;
    static TrainConfig from_config(const KeyValueConfig& cfg);
    KeyValueConfig to_config() const;
    static std::span<const std::string_view> known_keys();
};

struct SampleRef {
    int recording = 0;  // index into Dataset::recordings
    int frame = 0;
};

/// Batches of exactly two samples per label (size 2L). Each epoch draws a
/// seeded shuffle of every label's samples behind any carried leftovers;
/// samples that do not fill a batch carry into the next epoch.
class SmartBatcher {
public:
    /// `labels[i]` is the label of sample i. Throws InsufficientLabelSamples
    /// naming the first label with fewer than two samples.
    SmartBatcher(std::vector<int> labels, int num_labels, std::uint64_t seed);

    std::vector<std::vector<int>> next_epoch();
    std::size_t carried() const;
    int epoch() const { return epoch_; }

private:
    int num_labels_;
    std::uint64_t seed_;
    int epoch_ = 0;
    std::vector<std::vector<int>> by_label_;
    std::vector<std::vector<int>> carry_;
};

struct Model {
    NetworkConfig network;
    int num_labels = 0;
    ConvNet<float> net;

    Model(const NetworkConfig& cfg, int labels) : network(cfg), num_labels(labels), net(cfg) {}
    /// 64-bit FNV-1a over the little-endian float32 weights.
    std::uint64_t checksum() const;
};

/// Network shape for a dataset and train config.
NetworkConfig network_for(const Dataset& dataset, const TrainConfig& config);

/// "LARM" checkpoint: magic, u32 version, u32 num_labels, u32 x 7 network
/// fields, u64 weight count, float32 weights; all little-endian.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
/// Throws Io or Parse.
Model load_checkpoint(const std::filesystem::path& path);

struct StepTerms {
    double mse_term = 0.0;
    double dml_term = 0.0;
};

/// MSE over predictions plus lambda times the metric loss on the embeddings,
/// with gradients. `d_embeddings` is empty when the metric term is skipped.
template <typename T>
StepTerms combined_objective(const typename ConvNet<T>::Output& out, std::span<const int> labels, int num_labels,
                             const TrainConfig& config, typename ConvNet<T>::Vector& d_predictions,
                             typename ConvNet<T>::Matrix& d_embeddings);

/// Forward, backward and one SGD-with-momentum update on a batch.
class Trainer {
public:
    Trainer(Model& model, const TrainConfig& config);
    /// Throws NonFiniteLoss naming the epoch and batch.
    StepTerms step(std::span<const std::span<const float>> inputs, std::span<const int> labels, int epoch,
                   int batch_index);
    /// Gradient of the last step.
    const ConvNet<float>::Parameters& gradient() const { return grad_; }

private:
    Model& model_;
    TrainConfig config_;
    ConvNet<float>::Parameters grad_;
    ConvNet<float>::Parameters velocity_;
};

struct EvalOptions {
    bool smoothing = false;
    double alpha = 0.3;
    bool smooth_rounded = false;
};

struct MetricsReport {
    double accuracy = 0.0;
    double accuracy_pm1 = 0.0;
    std::size_t samples = 0;
    std::vector<std::vector<long>> confusion;  // [label][prediction]
};

/// Round half away from zero, then clamp to [0, num_labels - 1].
int round_count(double raw, int num_labels);

/// Counts for one time-ordered recording; smoothing restarts at its first frame.
std::vector<int> predict_counts(std::span<const double> raw, int num_labels, const EvalOptions& options);

/// Throws EmptySplit when there are no samples.
MetricsReport compute_metrics(std::span<const int> labels, std::span<const int> predictions, int num_labels);

/// Raw regression outputs per recording of `split`, in dataset order.
struct RawPredictions {
    std::vector<int> recording_labels;
    std::vector<std::vector<double>> values;
};
RawPredictions raw_predictions(const Model& model, const Dataset& dataset, Split split);
MetricsReport evaluate_raw(const RawPredictions& raw, int num_labels, const EvalOptions& options);
/// Throws EmptySplit.
MetricsReport evaluate(const Model& model, const Dataset& dataset, Split split, const EvalOptions& options);

struct EpochRow {
    int epoch = 0;
    double mse_term = 0.0;
    double dml_term = 0.0;
    double test_acc = 0.0;
    double test_acc_pm1 = 0.0;
};

struct TrainReport {
    std::vector<EpochRow> epochs;
    std::uint64_t model_checksum = 0;
    std::size_t carried_samples = 0;
    double wall_seconds = 0.0;

    /// epoch,mse_term,dml_term,test_acc,test_acc_pm1
    std::string csv() const;
};

using EpochCallback = std::function<void(const EpochRow&)>;

/// Trains on the training split of a standardized dataset and evaluates on
/// the test split after every epoch.
TrainReport train(Model& model, const Dataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Fresh model for a dataset, initialized from config.seed with the
/// regression bias at the mean label.
Model make_model(const Dataset& dataset, const TrainConfig& config);

/// sample_id,label,e_0..e_{D-1} for every frame of `split` (normalized embeddings).
std::string embedding_csv(const Model& model, const Dataset& dataset, Split split);

/// Confusion matrix rows "label,pred_0,...,pred_{L-1}".
std::string confusion_csv(const MetricsReport& report);

}  // namespace lar
