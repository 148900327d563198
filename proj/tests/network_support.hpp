#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "lar/trainer.hpp"

namespace lar::testing {

inline NetworkConfig tiny_network() {
    NetworkConfig c;
    c.channels = 2;
    c.height = 8;
    c.width = 8;
    c.stages = 3;
    c.feature_maps = 3;
    c.embedding_dim = 4;
    return c;
}

inline std::vector<std::vector<float>> random_inputs(std::uint64_t seed, int n, std::size_t size) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<float>> out(static_cast<std::size_t>(n), std::vector<float>(size));
    for (auto& v : out)
        for (auto& x : v) x = static_cast<float>(gauss(rng));
    return out;
}

inline std::vector<std::span<const float>> spans_of(const std::vector<std::vector<float>>& v) {
    return {v.begin(), v.end()};
}

template <typename T>
void randomize(ConvNet<T>& net, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    for (auto& p : net.parameters()) p = static_cast<T>(gauss(rng));
}

inline double total_loss(const ConvNet<double>& net, const std::vector<std::span<const float>>& inputs,
                         const std::vector<int>& labels, int num_labels, const TrainConfig& cfg) {
    const auto out = net.forward(inputs, false);
    ConvNet<double>::Vector dp;
    ConvNet<double>::Matrix de;
    const StepTerms t = combined_objective<double>(out, labels, num_labels, cfg, dp, de);
    return t.mse_term + cfg.lambda_dml * t.dml_term;
}

/// Max relative error (floor 1e-6) between backprop and central differences
/// over every parameter of the tiny network, six samples on three labels.
inline double network_gradient_error(DmlKind kind, double h = 1e-6) {
    const NetworkConfig nc = tiny_network();
    const std::vector<int> labels{2, 0, 1, 0, 2, 1};
    const auto inputs = random_inputs(21, 6, nc.input_size());
    const auto spans = spans_of(inputs);
    ConvNet<double> net(nc);
    randomize(net, 17, 0.4);
    net.parameters()[net.offsets().head_b] = 1.0;
    TrainConfig cfg;
    cfg.dml_kind = kind;
    cfg.constellation_k = 1;
    cfg.margin = 1.0;

    const auto out = net.forward(spans, true);
    ConvNet<double>::Vector dp;
    ConvNet<double>::Matrix de;
    combined_objective<double>(out, labels, 3, cfg, dp, de);
    ConvNet<double>::Parameters grad;
    net.backward(out, dp, de, grad);

    double worst = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double saved = net.parameters()[i];
        net.parameters()[i] = saved + h;
        const double up = total_loss(net, spans, labels, 3, cfg);
        net.parameters()[i] = saved - h;
        const double down = total_loss(net, spans, labels, 3, cfg);
        net.parameters()[i] = saved;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
    }
    return worst;
}

}  // namespace lar::testing
