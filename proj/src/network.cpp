#include "lar/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lar/error.hpp"

namespace lar {

namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StageShape {
    int height;
    int width;
    int in_channels;
};

// Rows of `in` are (n, y, x) pixels in HWC order; rows of the result are the
// same pixels with kernel x kernel x in_channels taps, zero outside the image.
template <typename T>
void im2col(const RowMatrix<T>& in, int n, const StageShape& s, int kernel, RowMatrix<T>& col) {
    const int pad = kernel / 2;
    const int c = s.in_channels;
    col.resize(static_cast<Eigen::Index>(n) * s.height * s.width, kernel * kernel * c);
    for (int b = 0; b < n; ++b) {
        for (int y = 0; y < s.height; ++y) {
            for (int x = 0; x < s.width; ++x) {
                T* dst = col.data() + ((static_cast<Eigen::Index>(b) * s.height + y) * s.width + x) * col.cols();
                for (int ky = 0; ky < kernel; ++ky) {
                    const int yy = y + ky - pad;
                    for (int kx = 0; kx < kernel; ++kx, dst += c) {
                        const int xx = x + kx - pad;
                        if (yy < 0 || yy >= s.height || xx < 0 || xx >= s.width) {
                            std::fill(dst, dst + c, T(0));
                        } else {
                            const T* src = in.data() + ((static_cast<Eigen::Index>(b) * s.height + yy) * s.width + xx) * c;
                            std::copy(src, src + c, dst);
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im(const RowMatrix<T>& col, int n, const StageShape& s, int kernel, RowMatrix<T>& out) {
    const int pad = kernel / 2;
    const int c = s.in_channels;
    out.setZero(static_cast<Eigen::Index>(n) * s.height * s.width, c);
    for (int b = 0; b < n; ++b) {
        for (int y = 0; y < s.height; ++y) {
            for (int x = 0; x < s.width; ++x) {
                const T* src = col.data() + ((static_cast<Eigen::Index>(b) * s.height + y) * s.width + x) * col.cols();
                for (int ky = 0; ky < kernel; ++ky) {
                    const int yy = y + ky - pad;
                    for (int kx = 0; kx < kernel; ++kx, src += c) {
                        const int xx = x + kx - pad;
                        if (yy < 0 || yy >= s.height || xx < 0 || xx >= s.width) continue;
                        T* dst = out.data() + ((static_cast<Eigen::Index>(b) * s.height + yy) * s.width + xx) * c;
                        for (int k = 0; k < c; ++k) dst[k] += src[k];
                    }
                }
            }
        }
    }
}

// 2x2 max pooling over HWC rows; argmax holds the winning input row per output element.
template <typename T>
void max_pool(const RowMatrix<T>& in, int n, int h, int w, RowMatrix<T>& out, std::vector<std::int32_t>* argmax) {
    const int c = static_cast<int>(in.cols());
    const int oh = h / 2;
    const int ow = w / 2;
    out.resize(static_cast<Eigen::Index>(n) * oh * ow, c);
    if (argmax) argmax->resize(static_cast<std::size_t>(out.size()));
    for (int b = 0; b < n; ++b) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                const Eigen::Index orow = (static_cast<Eigen::Index>(b) * oh + y) * ow + x;
                for (int k = 0; k < c; ++k) {
                    Eigen::Index best_row = (static_cast<Eigen::Index>(b) * h + 2 * y) * w + 2 * x;
                    T best = in(best_row, k);
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            const Eigen::Index r = (static_cast<Eigen::Index>(b) * h + 2 * y + dy) * w + 2 * x + dx;
                            if (in(r, k) > best) {
                                best = in(r, k);
                                best_row = r;
                            }
                        }
                    }
                    out(orow, k) = best;
                    if (argmax) (*argmax)[static_cast<std::size_t>(orow * c + k)] = static_cast<std::int32_t>(best_row);
                }
            }
        }
    }
}

}  // namespace

void NetworkConfig::validate() const {
    if (channels < 1 || stages < 1 || feature_maps < 1 || embedding_dim < 1) {
        throw Error(ErrorCode::InvalidArgument, "network sizes must be positive");
    }
    if (kernel < 1 || kernel % 2 == 0) throw Error(ErrorCode::InvalidArgument, "kernel must be odd");
    const int div = 1 << stages;
    if (height < div || width < div || height % div != 0 || width % div != 0) {
        throw Error(ErrorCode::InvalidArgument, "input height and width must be divisible by 2^stages");
    }
}

std::size_t NetworkConfig::parameter_count() const {
    std::size_t n = 0;
    int in = channels;
    for (int s = 0; s < stages; ++s) {
        n += static_cast<std::size_t>(kernel * kernel * in * feature_maps + feature_maps);
        in = feature_maps;
    }
    const auto f = static_cast<std::size_t>(flat_features());
    return n + f + 1 + f * static_cast<std::size_t>(embedding_dim) + static_cast<std::size_t>(embedding_dim);
}

template <typename T>
ConvNet<T>::ConvNet(const NetworkConfig& config) : config_(config) {
    config_.validate();
    std::size_t at = 0;
    int in = config_.channels;
    for (int s = 0; s < config_.stages; ++s) {
        offsets_.conv_w.push_back(at);
        at += static_cast<std::size_t>(config_.kernel * config_.kernel * in * config_.feature_maps);
        offsets_.conv_b.push_back(at);
        at += static_cast<std::size_t>(config_.feature_maps);
        in = config_.feature_maps;
    }
    const auto f = static_cast<std::size_t>(config_.flat_features());
    offsets_.head_w = at;
    at += f;
    offsets_.head_b = at;
    at += 1;
    offsets_.emb_w = at;
    at += f * static_cast<std::size_t>(config_.embedding_dim);
    offsets_.emb_b = at;
    at += static_cast<std::size_t>(config_.embedding_dim);
    params_.assign(at, T(0));
}

template <typename T>
void ConvNet<T>::initialize(std::uint64_t seed, double head_bias) {
    std::mt19937_64 rng(seed);
    std::fill(params_.begin(), params_.end(), T(0));
    auto fill_normal = [&](std::size_t offset, std::size_t count, double stddev) {
        std::normal_distribution<double> dist(0.0, stddev);
        for (std::size_t i = 0; i < count; ++i) params_[offset + i] = static_cast<T>(dist(rng));
    };
    int in = config_.channels;
    for (int s = 0; s < config_.stages; ++s) {
        const int fan_in = config_.kernel * config_.kernel * in;
        fill_normal(offsets_.conv_w[static_cast<std::size_t>(s)],
                    static_cast<std::size_t>(fan_in * config_.feature_maps), std::sqrt(2.0 / fan_in));
        in = config_.feature_maps;
    }
    const auto f = static_cast<std::size_t>(config_.flat_features());
    params_[offsets_.head_b] = static_cast<T>(head_bias);
    fill_normal(offsets_.emb_w, f * static_cast<std::size_t>(config_.embedding_dim),
                std::sqrt(1.0 / static_cast<double>(f)));
}

template <typename T>
typename ConvNet<T>::Output ConvNet<T>::forward(std::span<const std::span<const float>> samples,
                                                 bool keep_cache) const {
    const int n = static_cast<int>(samples.size());
    const NetworkConfig& c = config_;
    if (n == 0) throw Error(ErrorCode::ShapeMismatch, "empty input batch");
    const int plane = c.height * c.width;

    Matrix act(static_cast<Eigen::Index>(n) * plane, c.channels);
    for (int b = 0; b < n; ++b) {
        const auto& s = samples[static_cast<std::size_t>(b)];
        if (s.size() != c.input_size()) {
            throw Error(ErrorCode::ShapeMismatch, "sample " + std::to_string(b) + " has " + std::to_string(s.size()) +
                                                      " values, expected " + std::to_string(c.input_size()));
        }
        for (int ch = 0; ch < c.channels; ++ch) {
            for (int p = 0; p < plane; ++p) {
                act(static_cast<Eigen::Index>(b) * plane + p, ch) =
                    static_cast<T>(s[static_cast<std::size_t>(ch * plane + p)]);
            }
        }
    }

    Output out;
    if (keep_cache) out.stages.resize(static_cast<std::size_t>(c.stages));
    StageShape shape{c.height, c.width, c.channels};
    Matrix columns;
    Matrix conv;
    for (int s = 0; s < c.stages; ++s) {
        const int taps = c.kernel * c.kernel * shape.in_channels;
        Eigen::Map<const Matrix> w(params_.data() + offsets_.conv_w[static_cast<std::size_t>(s)], taps, c.feature_maps);
        Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(
            params_.data() + offsets_.conv_b[static_cast<std::size_t>(s)], c.feature_maps);
        im2col(act, n, shape, c.kernel, columns);
        conv.noalias() = columns * w;
        conv.rowwise() += bias;
        conv = conv.cwiseMax(T(0));
        Matrix pooled;
        max_pool(conv, n, shape.height, shape.width, pooled,
                 keep_cache ? &out.stages[static_cast<std::size_t>(s)].argmax : nullptr);
        if (keep_cache) {
            out.stages[static_cast<std::size_t>(s)].columns = std::move(columns);
            out.stages[static_cast<std::size_t>(s)].activations = std::move(conv);
            columns = Matrix();
            conv = Matrix();
        }
        act = std::move(pooled);
        shape = {shape.height / 2, shape.width / 2, c.feature_maps};
    }

    const int f = c.flat_features();
    out.features = Eigen::Map<const Matrix>(act.data(), n, f);
    Eigen::Map<const Vector> head_w(params_.data() + offsets_.head_w, f);
    out.head_pre = out.features * head_w;
    out.head_pre.array() += params_[offsets_.head_b];
    out.predictions = out.head_pre.cwiseMax(T(0));
    Eigen::Map<const Matrix> emb_w(params_.data() + offsets_.emb_w, f, c.embedding_dim);
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> emb_b(params_.data() + offsets_.emb_b, c.embedding_dim);
    out.embeddings = out.features * emb_w;
    out.embeddings.rowwise() += emb_b;
    return out;
}

template <typename T>
void ConvNet<T>::backward(const Output& out, const Vector& d_predictions, const Matrix& d_embeddings,
                          Parameters& grad) const {
    const NetworkConfig& c = config_;
    const int n = static_cast<int>(out.features.rows());
    if (out.stages.size() != static_cast<std::size_t>(c.stages)) {
        throw Error(ErrorCode::InvalidArgument, "backward needs a forward pass with keep_cache");
    }
    if (d_predictions.size() != n || d_embeddings.rows() != n || d_embeddings.cols() != c.embedding_dim) {
        throw Error(ErrorCode::ShapeMismatch, "upstream gradient shape does not match the forward pass");
    }
    grad.resize(params_.size(), T(0));
    const int f = c.flat_features();

    const Vector d_head = d_predictions.cwiseProduct((out.head_pre.array() > T(0)).template cast<T>().matrix());
    Eigen::Map<Vector> g_head_w(grad.data() + offsets_.head_w, f);
    g_head_w.noalias() += out.features.transpose() * d_head;
    grad[offsets_.head_b] += d_head.sum();
    Eigen::Map<Matrix> g_emb_w(grad.data() + offsets_.emb_w, f, c.embedding_dim);
    g_emb_w.noalias() += out.features.transpose() * d_embeddings;
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> g_emb_b(grad.data() + offsets_.emb_b, c.embedding_dim);
    g_emb_b += d_embeddings.colwise().sum();

    Eigen::Map<const Vector> head_w(params_.data() + offsets_.head_w, f);
    Eigen::Map<const Matrix> emb_w(params_.data() + offsets_.emb_w, f, c.embedding_dim);
    Matrix d_features = d_head * head_w.transpose();
    d_features.noalias() += d_embeddings * emb_w.transpose();

    int h = c.height >> c.stages;
    int w = c.width >> c.stages;
    Matrix d_pooled = Eigen::Map<const Matrix>(d_features.data(), static_cast<Eigen::Index>(n) * h * w, c.feature_maps);
    for (int s = c.stages - 1; s >= 0; --s) {
        const StageCache& cache = out.stages[static_cast<std::size_t>(s)];
        h *= 2;
        w *= 2;
        const int in_channels = s == 0 ? c.channels : c.feature_maps;
        Matrix d_conv = Matrix::Zero(cache.activations.rows(), cache.activations.cols());
        const int fm = c.feature_maps;
        for (Eigen::Index r = 0; r < d_pooled.rows(); ++r) {
            for (int k = 0; k < fm; ++k) {
                const auto src = static_cast<Eigen::Index>(cache.argmax[static_cast<std::size_t>(r * fm + k)]);
                if (cache.activations(src, k) > T(0)) d_conv(src, k) += d_pooled(r, k);
            }
        }
        const int taps = c.kernel * c.kernel * in_channels;
        Eigen::Map<Matrix> g_w(grad.data() + offsets_.conv_w[static_cast<std::size_t>(s)], taps, fm);
        g_w.noalias() += cache.columns.transpose() * d_conv;
        Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> g_b(grad.data() + offsets_.conv_b[static_cast<std::size_t>(s)],
                                                            fm);
        g_b += d_conv.colwise().sum();
        if (s == 0) break;
        Eigen::Map<const Matrix> wmat(params_.data() + offsets_.conv_w[static_cast<std::size_t>(s)], taps, fm);
        const Matrix d_columns = d_conv * wmat.transpose();
        col2im(d_columns, n, StageShape{h, w, in_channels}, c.kernel, d_pooled);
    }
}

template class ConvNet<float>;
template class ConvNet<double>;

}  // namespace lar
