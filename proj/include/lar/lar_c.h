#ifndef LAR_C_H
#define LAR_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LAR_API __declspec(dllexport)
#else
#define LAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lar_status {
    LAR_OK = 0,
    LAR_ERR_INVALID_ARGUMENT,
    LAR_ERR_ZERO_VECTOR,
    LAR_ERR_EQUAL_LABELS,
    LAR_ERR_DEGENERATE_BATCH,
    LAR_ERR_BAD_K,
    LAR_ERR_NON_FINITE,
    LAR_ERR_DIMENSION,
    LAR_ERR_BAD_EPSILON,
    LAR_ERR_RANGE_ALIASED,
    LAR_ERR_WRONG_FRAME_COUNT,
    LAR_ERR_CHANNEL_MISMATCH,
    LAR_ERR_INSUFFICIENT_LABEL_SAMPLES,
    LAR_ERR_SHAPE_MISMATCH,
    LAR_ERR_NON_FINITE_LOSS,
    LAR_ERR_EMPTY_SPLIT,
    LAR_ERR_BAD_ALPHA,
    LAR_ERR_IO,
    LAR_ERR_PARSE,
    LAR_ERR_DATASET,
    LAR_ERR_USAGE,
    LAR_ERR_VERIFICATION_FAILED,
    LAR_ERR_INTERNAL
} lar_status;

typedef enum lar_loss_kind {
    LAR_LOSS_TRIPLET = 0,
    LAR_LOSS_MC_N_PAIR = 1,
    LAR_LOSS_CONSTELLATION = 2,
    LAR_LOSS_LAR = 3
} lar_loss_kind;

typedef struct lar_loss_params {
    double margin;            /* triplet */
    int constellation_k;      /* constellation */
    double multiplier_offset; /* lar */
} lar_loss_params;

typedef struct lar_batch lar_batch;
typedef struct lar_smoother lar_smoother;
typedef struct lar_model lar_model;

typedef void (*lar_log_fn)(const char* line, void* user);

/* Message of the last failed call on this thread; never NULL. */
LAR_API const char* lar_last_error(void);
LAR_API const char* lar_status_name(lar_status status);
LAR_API const char* lar_version(void);
/* 0 success, 1 usage/config, 2 verification failure, 3 numeric failure. */
LAR_API int lar_exit_code(lar_status status);

LAR_API lar_loss_params lar_default_loss_params(void);

/* Copies n x dim row-major vectors and n labels in [0, num_labels). */
LAR_API lar_status lar_batch_create(const double* vectors, const int* labels, int n, int dim, int num_labels,
                                    lar_batch** out);
LAR_API void lar_batch_destroy(lar_batch* batch);

/* grads may be NULL; otherwise it receives n x dim row-major values. params may be NULL for defaults. */
LAR_API lar_status lar_loss_evaluate(const lar_batch* batch, lar_loss_kind kind, const lar_loss_params* params,
                                     double* value, double* grads);
LAR_API lar_status lar_label_distance(int a, int b, int num_labels, int* out);

LAR_API lar_status lar_smoother_create(double alpha, lar_smoother** out);
LAR_API lar_status lar_smoother_update(lar_smoother* smoother, double x, double* out);
LAR_API void lar_smoother_reset(lar_smoother* smoother);
LAR_API void lar_smoother_destroy(lar_smoother* smoother);

/* Round half away from zero, clamp to [0, num_labels - 1]. */
LAR_API lar_status lar_round_count(double raw, int num_labels, int* out);

LAR_API lar_status lar_model_load(const char* path, lar_model** out);
LAR_API void lar_model_destroy(lar_model* model);
/* Any out pointer may be NULL. input_size = channels * height * width. */
LAR_API lar_status lar_model_info(const lar_model* model, int* num_labels, int* embedding_dim, size_t* input_size,
                                  uint64_t* checksum);
/* frames holds n CHW float tensors back to back (standardized values);
   raw receives n regression outputs, embeddings (may be NULL) n x D normalized rows. */
LAR_API lar_status lar_model_predict(const lar_model* model, const float* frames, int n, double* raw,
                                     double* embeddings);

/* Progress lines of the command entry points; NULL disables. Process-wide. */
LAR_API void lar_set_log(lar_log_fn fn, void* user);

/* Newline-separated config keys accepted by a command, or NULL for an unknown command. */
LAR_API const char* lar_command_keys(const char* command);

/* Command entry points. config_path may be NULL; overrides are "key=value"
   strings applied on top of the file. dataset_dir / checkpoint may be NULL
   for commands that do not read them. */
LAR_API lar_status lar_cmd_run(const char* command, const char* config_path, const char* const* overrides,
                               int n_overrides, const char* dataset_dir, const char* checkpoint,
                               const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
