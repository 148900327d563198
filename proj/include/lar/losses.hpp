#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace lar {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N embedding rows with their integer labels in [0, num_labels).
///
/// Losses accept raw (unnormalized) rows and normalize internally, so the
/// gradients they return are with respect to the raw coordinates.
struct EmbeddingBatch {
    Matrix vectors;
    std::vector<int> labels;
    int num_labels = 0;

    Eigen::Index size() const { return vectors.rows(); }
    Eigen::Index dim() const { return vectors.cols(); }

    /// Throws InvalidArgument on shape or label-range violations.
    void validate() const;
};

enum class LossKind { Triplet, McNPair, Constellation, LAR, MSE, Combined };

const char* to_string(LossKind kind) noexcept;

struct LossOutput {
    double value = 0.0;
    Matrix grads;
    LossKind kind = LossKind::LAR;
};

/// Hinge margin of the triplet loss, in squared-Euclidean units.
class TripletMargin {
public:
    explicit TripletMargin(double m = 1.0);
    double value() const { return m_; }

private:
    double m_;
};

/// Row-wise unit normalization. Throws ZeroVector naming the first row whose
/// norm is <= 1e-12.
Matrix normalize(const Matrix& vectors);

/// Circular label distance min(|a-b|, |L-|a-b||). Throws EqualLabels when a == b.
int label_distance(int a, int b, int num_labels);

LossOutput triplet_loss(const EmbeddingBatch& batch, TripletMargin margin = TripletMargin{});
LossOutput mc_n_pair_loss(const EmbeddingBatch& batch);
LossOutput constellation_loss(const EmbeddingBatch& batch, int k);

/// Label-aware ranked loss. Each negative inner product is scaled by
/// log(label_distance + multiplier_offset); offset 0 is the reference form.
LossOutput lar_loss(const EmbeddingBatch& batch, double multiplier_offset = 0.0);

/// Selects one of the four metric losses with its hyperparameters.
struct DmlLossConfig {
    LossKind kind = LossKind::LAR;
    double margin = 1.0;
    int constellation_k = 3;
    double multiplier_offset = 0.0;
};

LossOutput dml_loss(const EmbeddingBatch& batch, const DmlLossConfig& config);

using LossFunction = std::function<double(const EmbeddingBatch&)>;

/// Central-difference gradient of `loss` over every raw coordinate of the
/// batch. `h` must lie in [1e-7, 1e-3].
Matrix finite_diff_gradient(const LossFunction& loss, const EmbeddingBatch& batch, double h);

/// Anchor/positive pairing inside a smart batch (every present label exactly
/// twice): partner[i] is the other sample carrying label i's label.
struct PairLayout {
    std::vector<int> partner;
    std::vector<int> present_labels;  // ascending
};

/// Throws DegenerateBatch if fewer than two labels are present or any present
/// label does not appear exactly twice.
PairLayout pair_layout(const EmbeddingBatch& batch);

}  // namespace lar
