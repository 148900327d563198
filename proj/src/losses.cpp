#include "lar/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lar/error.hpp"

namespace lar {

const char* to_string(LossKind kind) noexcept {
    switch (kind) {
        case LossKind::Triplet: return "triplet";
        case LossKind::McNPair: return "mc_n_pair";
        case LossKind::Constellation: return "constellation";
        case LossKind::LAR: return "lar";
        case LossKind::MSE: return "mse";
        case LossKind::Combined: return "combined";
    }
    return "unknown";
}

void EmbeddingBatch::validate() const {
    if (num_labels < 2) {
        throw Error(ErrorCode::InvalidArgument, "num_labels must be >= 2");
    }
    if (static_cast<Eigen::Index>(labels.size()) != vectors.rows()) {
        throw Error(ErrorCode::InvalidArgument,
                    "label count " + std::to_string(labels.size()) + " does not match " +
                        std::to_string(vectors.rows()) + " embedding rows");
    }
    if (vectors.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_labels) {
            throw Error(ErrorCode::InvalidArgument,
                        "label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_labels) + ")");
        }
    }
}

TripletMargin::TripletMargin(double m) : m_(m) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw Error(ErrorCode::InvalidArgument, "triplet margin must be a positive finite value");
    }
}

Matrix normalize(const Matrix& vectors) {
    Matrix out(vectors.rows(), vectors.cols());
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        const double norm = vectors.row(i).norm();
        if (!(norm > 1e-12)) {
            throw Error(ErrorCode::ZeroVector, "row " + std::to_string(i) + " has zero norm");
        }
        out.row(i) = vectors.row(i) / norm;
    }
    return out;
}

int label_distance(int a, int b, int num_labels) {
    if (num_labels < 2 || a < 0 || b < 0 || a >= num_labels || b >= num_labels) {
        throw Error(ErrorCode::InvalidArgument,
                    "labels (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") outside [0, " + std::to_string(num_labels) + ")");
    }
    if (a == b) {
        throw Error(ErrorCode::EqualLabels,
                    "label distance undefined for equal labels (" + std::to_string(a) + ")");
    }
    const int d = std::abs(a - b);
    return std::min(d, std::abs(num_labels - d));
}

PairLayout pair_layout(const EmbeddingBatch& batch) {
    batch.validate();
    const auto n = static_cast<int>(batch.labels.size());
    std::vector<std::vector<int>> members(static_cast<std::size_t>(batch.num_labels));
    for (int i = 0; i < n; ++i) {
        members[static_cast<std::size_t>(batch.labels[static_cast<std::size_t>(i)])].push_back(i);
    }

    PairLayout layout;
    layout.partner.assign(static_cast<std::size_t>(n), -1);
    for (int label = 0; label < batch.num_labels; ++label) {
        const auto& idx = members[static_cast<std::size_t>(label)];
        if (idx.empty()) continue;
        if (idx.size() != 2) {
            throw Error(ErrorCode::DegenerateBatch,
                        "label " + std::to_string(label) + " appears " + std::to_string(idx.size()) +
                            " times; smart batches need exactly two samples per label");
        }
        layout.partner[static_cast<std::size_t>(idx[0])] = idx[1];
        layout.partner[static_cast<std::size_t>(idx[1])] = idx[0];
        layout.present_labels.push_back(label);
    }
    if (layout.present_labels.size() < 2) {
        throw Error(ErrorCode::DegenerateBatch, "at least two distinct labels are required");
    }
    return layout;
}

namespace {

// Pulls a gradient taken w.r.t. unit rows back to the raw rows.
Matrix chain_normalization(const Matrix& raw, const Matrix& unit, const Matrix& unit_grads) {
    Matrix out(raw.rows(), raw.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        const double norm = raw.row(i).norm();
        const double radial = unit_grads.row(i).dot(unit.row(i));
        out.row(i) = (unit_grads.row(i) - radial * unit.row(i)) / norm;
    }
    return out;
}

// Each negative label contributes the mean of its two samples' exponentials.
constexpr double kNegativeShare = 0.5;

struct NegativeTerm {
    int index;
    double weight;
};

// Shared body of the three log(1 + sum exp) losses. For anchor i with
// positive p and negative label c (weight w) represented by its two samples:
//   z_j = w * <u_i, u_j> - <u_i, u_p>,
//   loss_i = log(1 + sum_c (exp(z_c1) + exp(z_c2)) / 2),
// evaluated with a max shift. Anchors run over every sample, so the value is
// the mean over both role orderings of every label in the smart batch.
template <typename NegativesFn>
LossOutput log_sum_exp_ranking(const EmbeddingBatch& batch, const PairLayout& layout,
                               NegativesFn&& negatives_of, LossKind kind) {
    const Matrix unit = normalize(batch.vectors);
    const Matrix gram = unit * unit.transpose();
    const Eigen::Index n = unit.rows();

    Matrix unit_grads = Matrix::Zero(n, unit.cols());
    double total = 0.0;
    std::vector<NegativeTerm> terms;
    std::vector<double> z;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int p = layout.partner[static_cast<std::size_t>(i)];
        terms.clear();
        negatives_of(static_cast<int>(i), terms);

        z.resize(terms.size());
        double shift = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            z[t] = terms[t].weight * gram(i, terms[t].index) - gram(i, p);
            shift = std::max(shift, z[t]);
        }
        double denom = std::exp(-shift);
        for (const double zt : z) denom += kNegativeShare * std::exp(zt - shift);
        total += shift + std::log(denom);

        double sigma_sum = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const double sigma = kNegativeShare * std::exp(z[t] - shift) / denom;
            const int j = terms[t].index;
            sigma_sum += sigma;
            unit_grads.row(i) += sigma * terms[t].weight * unit.row(j);
            unit_grads.row(j) += sigma * terms[t].weight * unit.row(i);
        }
        unit_grads.row(i) -= sigma_sum * unit.row(p);
        unit_grads.row(p) -= sigma_sum * unit.row(i);
    }

    const double scale = 1.0 / static_cast<double>(n);
    LossOutput out;
    out.kind = kind;
    out.value = total * scale;
    out.grads = chain_normalization(batch.vectors, unit, unit_grads * scale);
    return out;
}

bool is_negative(const EmbeddingBatch& batch, int anchor, int j) {
    return batch.labels[static_cast<std::size_t>(anchor)] != batch.labels[static_cast<std::size_t>(j)];
}

}  // namespace

LossOutput triplet_loss(const EmbeddingBatch& batch, TripletMargin margin) {
    const PairLayout layout = pair_layout(batch);
    const Matrix unit = normalize(batch.vectors);
    const Matrix gram = unit * unit.transpose();
    const Eigen::Index n = unit.rows();
    const double m = margin.value();

    Matrix unit_grads = Matrix::Zero(n, unit.cols());
    double total = 0.0;
    long triples = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        const int p = layout.partner[static_cast<std::size_t>(a)];
        const double dp = gram(a, a) + gram(p, p) - 2.0 * gram(a, p);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (batch.labels[static_cast<std::size_t>(j)] == batch.labels[static_cast<std::size_t>(a)]) {
                continue;
            }
            ++triples;
            const double dn = gram(a, a) + gram(j, j) - 2.0 * gram(a, j);
            const double hinge = dp - dn + m;
            if (hinge <= 0.0) continue;
            total += hinge;
            unit_grads.row(a) += 2.0 * (unit.row(j) - unit.row(p));
            unit_grads.row(p) -= 2.0 * (unit.row(a) - unit.row(p));
            unit_grads.row(j) += 2.0 * (unit.row(a) - unit.row(j));
        }
    }

    const double scale = 1.0 / static_cast<double>(triples);
    LossOutput out;
    out.kind = LossKind::Triplet;
    out.value = total * scale;
    out.grads = chain_normalization(batch.vectors, unit, unit_grads * scale);
    return out;
}

LossOutput mc_n_pair_loss(const EmbeddingBatch& batch) {
    const PairLayout layout = pair_layout(batch);
    const auto n = static_cast<int>(batch.size());
    return log_sum_exp_ranking(
        batch, layout,
        [&](int anchor, std::vector<NegativeTerm>& terms) {
            for (int j = 0; j < n; ++j) {
                if (is_negative(batch, anchor, j)) terms.push_back({j, 1.0});
            }
        },
        LossKind::McNPair);
}

LossOutput constellation_loss(const EmbeddingBatch& batch, int k) {
    const PairLayout layout = pair_layout(batch);
    const auto available = static_cast<int>(layout.present_labels.size()) - 1;
    if (k < 1 || k > available) {
        throw Error(ErrorCode::BadK, "K=" + std::to_string(k) + " outside [1, " +
                                         std::to_string(available) + "] negative labels");
    }

    // Per anchor label: the K nearest labels by circular distance, ties to the
    // smaller label value.
    std::vector<std::vector<char>> selected(static_cast<std::size_t>(batch.num_labels),
                                            std::vector<char>(static_cast<std::size_t>(batch.num_labels), 0));
    for (const int anchor_label : layout.present_labels) {
        std::vector<int> candidates;
        for (const int label : layout.present_labels) {
            if (label != anchor_label) candidates.push_back(label);
        }
        std::stable_sort(candidates.begin(), candidates.end(), [&](int x, int y) {
            return label_distance(anchor_label, x, batch.num_labels) <
                   label_distance(anchor_label, y, batch.num_labels);
        });
        for (int t = 0; t < k; ++t) {
            selected[static_cast<std::size_t>(anchor_label)][static_cast<std::size_t>(candidates[static_cast<std::size_t>(t)])] = 1;
        }
    }

    const auto n = static_cast<int>(batch.size());
    return log_sum_exp_ranking(
        batch, layout,
        [&](int anchor, std::vector<NegativeTerm>& terms) {
            const auto& row = selected[static_cast<std::size_t>(batch.labels[static_cast<std::size_t>(anchor)])];
            for (int j = 0; j < n; ++j) {
                if (is_negative(batch, anchor, j) &&
                    row[static_cast<std::size_t>(batch.labels[static_cast<std::size_t>(j)])]) {
                    terms.push_back({j, 1.0});
                }
            }
        },
        LossKind::Constellation);
}

LossOutput lar_loss(const EmbeddingBatch& batch, double multiplier_offset) {
    if (!(multiplier_offset >= 0.0) || !std::isfinite(multiplier_offset)) {
        throw Error(ErrorCode::InvalidArgument, "multiplier_offset must be finite and >= 0");
    }
    const PairLayout layout = pair_layout(batch);
    const auto n = static_cast<int>(batch.size());
    return log_sum_exp_ranking(
        batch, layout,
        [&](int anchor, std::vector<NegativeTerm>& terms) {
            const int ta = batch.labels[static_cast<std::size_t>(anchor)];
            for (int j = 0; j < n; ++j) {
                if (!is_negative(batch, anchor, j)) continue;
                const int delta = label_distance(ta, batch.labels[static_cast<std::size_t>(j)], batch.num_labels);
                terms.push_back({j, std::log(static_cast<double>(delta) + multiplier_offset)});
            }
        },
        LossKind::LAR);
}

LossOutput dml_loss(const EmbeddingBatch& batch, const DmlLossConfig& config) {
    switch (config.kind) {
        case LossKind::Triplet: return triplet_loss(batch, TripletMargin{config.margin});
        case LossKind::McNPair: return mc_n_pair_loss(batch);
        case LossKind::Constellation: return constellation_loss(batch, config.constellation_k);
        case LossKind::LAR: return lar_loss(batch, config.multiplier_offset);
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument,
                std::string("not a metric loss: ") + to_string(config.kind));
}

Matrix finite_diff_gradient(const LossFunction& loss, const EmbeddingBatch& batch, double h) {
    if (!(h >= 1e-7 && h <= 1e-3)) {
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must lie in [1e-7, 1e-3]");
    }
    EmbeddingBatch probe = batch;
    Matrix grads(batch.vectors.rows(), batch.vectors.cols());
    for (Eigen::Index i = 0; i < grads.rows(); ++i) {
        for (Eigen::Index d = 0; d < grads.cols(); ++d) {
            const double original = batch.vectors(i, d);
            probe.vectors(i, d) = original + h;
            const double up = loss(probe);
            probe.vectors(i, d) = original - h;
            const double down = loss(probe);
            probe.vectors(i, d) = original;
            grads(i, d) = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

}  // namespace lar
