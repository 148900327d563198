#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lar {

/// Encoder of `stages` x (conv kernel x kernel, stride 1, same padding, ReLU,
/// 2x2 max pool) followed by two heads on the flattened features: a fully
/// connected ReLU scalar regressor and a linear projection to the embedding.
struct NetworkConfig {
    int channels = 6;
    int height = 32;
    int width = 64;
    int stages = 3;
    int feature_maps = 32;
    int kernel = 3;
    int embedding_dim = 16;

    /// Throws InvalidArgument.
    void validate() const;
    int flat_features() const { return feature_maps * (height >> stages) * (width >> stages); }
    std::size_t input_size() const {
        return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    std::size_t parameter_count() const;
};

template <typename T>
class ConvNet {
public:
    using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    /// Flat parameter or gradient storage. The base is aligned so Eigen picks
    /// the same kernels, and the same summation order, on every run.
    using Parameters = std::vector<T, Eigen::aligned_allocator<T>>;

    struct StageCache {
        Matrix columns;                   // im2col of the stage input
        Matrix activations;               // post-ReLU, before pooling
        std::vector<std::int32_t> argmax; // per pooled element, row into activations
    };

    struct Output {
        Vector predictions;  // ReLU(head)
        Vector head_pre;     // before ReLU
        Matrix embeddings;   // N x D, not normalized
        Matrix features;     // N x flat_features
        std::vector<StageCache> stages;  // empty unless requested
    };

    explicit ConvNet(const NetworkConfig& config);

    const NetworkConfig& config() const { return config_; }
    Parameters& parameters() { return params_; }
    const Parameters& parameters() const { return params_; }

    /// He-normal conv weights, zero conv biases, zero regression weights with
    /// bias `head_bias`, N(0, 1/F) embedding projection.
    void initialize(std::uint64_t seed, double head_bias);

    /// Each sample is a CHW tensor of config().input_size() values. Throws ShapeMismatch.
    Output forward(std::span<const std::span<const float>> samples, bool keep_cache) const;

    /// Accumulates into `grad` (resized to the parameter count) the gradient of
    /// sum(d_predictions . predictions) + sum(d_embeddings : embeddings).
    void backward(const Output& out, const Vector& d_predictions, const Matrix& d_embeddings,
                  Parameters& grad) const;

    struct Offsets {
        std::vector<std::size_t> conv_w;
        std::vector<std::size_t> conv_b;
        std::size_t head_w = 0;
        std::size_t head_b = 0;
        std::size_t emb_w = 0;
        std::size_t emb_b = 0;
    };
    const Offsets& offsets() const { return offsets_; }

private:
    NetworkConfig config_;
    Offsets offsets_;
    Parameters params_;
};

extern template class ConvNet<float>;
extern template class ConvNet<double>;

}  // namespace lar
