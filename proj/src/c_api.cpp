#include "lar/lar_c.h"

#include <cstring>
#include <mutex>
#include <new>
#include <string>
#include <vector>

#include "lar/commands.hpp"
#include "lar/error.hpp"
#include "lar/losses.hpp"
#include "lar/smoothing.hpp"
#include "lar/trainer.hpp"

struct lar_batch {
    lar::EmbeddingBatch batch;
};

struct lar_smoother {
    lar::SmoothingState state;
};

struct lar_model {
    lar::Model model;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mutex;
lar_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

lar_status status_of(lar::ErrorCode code) {
    return static_cast<lar_status>(static_cast<int>(code) + 1);
}

lar_status fail(lar_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <typename F>
lar_status guarded(F&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LAR_OK;
    } catch (const lar::Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(LAR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(LAR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(LAR_ERR_INTERNAL, "unknown error");
    }
}

lar_status null_arg(const char* name) {
    return fail(LAR_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

void emit_log(const std::string& line) {
    std::lock_guard lock(g_log_mutex);
    if (g_log_fn) g_log_fn(line.c_str(), g_log_user);
}

}  // namespace

extern "C" {

const char* lar_last_error(void) { return g_last_error.c_str(); }

const char* lar_status_name(lar_status status) {
    if (status == LAR_OK) return "Ok";
    if (status == LAR_ERR_INTERNAL) return "Internal";
    if (status > LAR_OK && status < LAR_ERR_INTERNAL) {
        return lar::to_string(static_cast<lar::ErrorCode>(static_cast<int>(status) - 1));
    }
    return "Unknown";
}

const char* lar_version(void) { return lar::cmd::version().data(); }

int lar_exit_code(lar_status status) {
    if (status == LAR_OK) return 0;
    if (status == LAR_ERR_INTERNAL) return 1;
    return lar::cmd::exit_code_for(static_cast<lar::ErrorCode>(static_cast<int>(status) - 1));
}

lar_loss_params lar_default_loss_params(void) {
    const lar::DmlLossConfig d;
    return {d.margin, d.constellation_k, d.multiplier_offset};
}

lar_status lar_batch_create(const double* vectors, const int* labels, int n, int dim, int num_labels,
                            lar_batch** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!vectors) return null_arg("vectors");
    if (!labels) return null_arg("labels");
    if (n <= 0 || dim <= 0) return fail(LAR_ERR_INVALID_ARGUMENT, "n and dim must be positive");
    return guarded([&] {
        auto b = std::make_unique<lar_batch>();
        b->batch.vectors = Eigen::Map<const lar::Matrix>(vectors, n, dim);
        b->batch.labels.assign(labels, labels + n);
        b->batch.num_labels = num_labels;
        b->batch.validate();
        *out = b.release();
    });
}

void lar_batch_destroy(lar_batch* batch) { delete batch; }

lar_status lar_loss_evaluate(const lar_batch* batch, lar_loss_kind kind, const lar_loss_params* params, double* value,
                             double* grads) {
    if (!batch) return null_arg("batch");
    if (!value) return null_arg("value");
    return guarded([&] {
        lar::DmlLossConfig cfg;
        switch (kind) {
            case LAR_LOSS_TRIPLET: cfg.kind = lar::LossKind::Triplet; break;
            case LAR_LOSS_MC_N_PAIR: cfg.kind = lar::LossKind::McNPair; break;
            case LAR_LOSS_CONSTELLATION: cfg.kind = lar::LossKind::Constellation; break;
            case LAR_LOSS_LAR: cfg.kind = lar::LossKind::LAR; break;
            default: throw lar::Error(lar::ErrorCode::InvalidArgument, "unknown loss kind");
        }
        if (params) {
            cfg.margin = params->margin;
            cfg.constellation_k = params->constellation_k;
            cfg.multiplier_offset = params->multiplier_offset;
        }
        const lar::LossOutput r = lar::dml_loss(batch->batch, cfg);
        *value = r.value;
        if (grads) std::memcpy(grads, r.grads.data(), sizeof(double) * static_cast<std::size_t>(r.grads.size()));
    });
}

lar_status lar_label_distance(int a, int b, int num_labels, int* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = lar::label_distance(a, b, num_labels); });
}

lar_status lar_smoother_create(double alpha, lar_smoother** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new lar_smoother{lar::SmoothingState(alpha)}; });
}

lar_status lar_smoother_update(lar_smoother* smoother, double x, double* out) {
    if (!smoother) return null_arg("smoother");
    if (!out) return null_arg("out");
    return guarded([&] { *out = smoother->state.update(x); });
}

void lar_smoother_reset(lar_smoother* smoother) {
    if (smoother) smoother->state.reset();
}

void lar_smoother_destroy(lar_smoother* smoother) { delete smoother; }

lar_status lar_round_count(double raw, int num_labels, int* out) {
    if (!out) return null_arg("out");
    if (num_labels < 1) return fail(LAR_ERR_INVALID_ARGUMENT, "num_labels must be >= 1");
    *out = lar::round_count(raw, num_labels);
    g_last_error.clear();
    return LAR_OK;
}

lar_status lar_model_load(const char* path, lar_model** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!path) return null_arg("path");
    return guarded([&] { *out = new lar_model{lar::load_checkpoint(path)}; });
}

void lar_model_destroy(lar_model* model) { delete model; }

lar_status lar_model_info(const lar_model* model, int* num_labels, int* embedding_dim, size_t* input_size,
                          uint64_t* checksum) {
    if (!model) return null_arg("model");
    if (num_labels) *num_labels = model->model.num_labels;
    if (embedding_dim) *embedding_dim = model->model.network.embedding_dim;
    if (input_size) *input_size = model->model.network.input_size();
    if (checksum) *checksum = model->model.checksum();
    g_last_error.clear();
    return LAR_OK;
}

lar_status lar_model_predict(const lar_model* model, const float* frames, int n, double* raw, double* embeddings) {
    if (!model) return null_arg("model");
    if (!frames) return null_arg("frames");
    if (!raw) return null_arg("raw");
    if (n <= 0) return fail(LAR_ERR_INVALID_ARGUMENT, "n must be positive");
    return guarded([&] {
        const std::size_t size = model->model.network.input_size();
        std::vector<std::span<const float>> spans;
        for (int i = 0; i < n; ++i) spans.emplace_back(frames + static_cast<std::size_t>(i) * size, size);
        const auto o = model->model.net.forward(spans, false);
        for (int i = 0; i < n; ++i) raw[i] = o.predictions(i);
        if (embeddings) {
            const lar::Matrix e = lar::normalize(o.embeddings.cast<double>());
            std::memcpy(embeddings, e.data(), sizeof(double) * static_cast<std::size_t>(e.size()));
        }
    });
}

void lar_set_log(lar_log_fn fn, void* user) {
    std::lock_guard lock(g_log_mutex);
    g_log_fn = fn;
    g_log_user = user;
}

const char* lar_command_keys(const char* command) {
    static thread_local std::string joined;
    if (!command) {
        null_arg("command");
        return nullptr;
    }
    try {
        joined.clear();
        for (std::string_view k : lar::cmd::known_keys(command)) {
            joined += k;
            joined += '\n';
        }
        return joined.c_str();
    } catch (const lar::Error& e) {
        fail(status_of(e.code()), e.what());
        return nullptr;
    }
}

lar_status lar_cmd_run(const char* command, const char* config_path, const char* const* overrides, int n_overrides,
                       const char* dataset_dir, const char* checkpoint, const char* out_dir) {
    if (!command) return null_arg("command");
    if (n_overrides > 0 && !overrides) return null_arg("overrides");
    return guarded([&] {
        lar::cmd::Invocation in;
        if (config_path && *config_path) in.config = lar::KeyValueConfig::load(config_path);
        std::vector<std::string> ov;
        for (int i = 0; i < n_overrides; ++i) ov.emplace_back(overrides[i] ? overrides[i] : "");
        in.config.apply_overrides(ov);
        if (dataset_dir) in.dataset = dataset_dir;
        if (checkpoint) in.checkpoint = checkpoint;
        if (out_dir) in.out_dir = out_dir;
        in.log = emit_log;
        const std::string_view cmd(command);
        if (cmd == "verify-geometry") {
            lar::cmd::verify_geometry(in);
        } else if (cmd == "synth") {
            lar::cmd::synth(in);
        } else if (cmd == "train") {
            lar::cmd::train(in);
        } else if (cmd == "evaluate") {
            lar::cmd::evaluate(in);
        } else if (cmd == "ablation") {
            lar::cmd::ablation(in);
        } else {
            throw lar::Error(lar::ErrorCode::Usage, "unknown command '" + std::string(cmd) + "'");
        }
    });
}

}  // extern "C"
