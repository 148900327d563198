#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "lar/config.hpp"
#include "lar/error.hpp"

namespace lar::cmd {

using Logger = std::function<void(const std::string&)>;

/// Inputs shared by every command. `config` already holds file values plus
/// overrides; `dataset` and `checkpoint` are empty when unused.
struct Invocation {
    KeyValueConfig config;
    std::filesystem::path out_dir;
    std::filesystem::path dataset;
    std::filesystem::path checkpoint;
    Logger log;
};

/// Config keys accepted by a command; throws Usage for unknown commands.
std::span<const std::string_view> known_keys(std::string_view command);

/// Each command writes its outputs plus manifest.txt into out_dir. Failed
/// checks raise VerificationFailed after every report has been written.
void verify_geometry(const Invocation& in);
void synth(const Invocation& in);
void train(const Invocation& in);
void evaluate(const Invocation& in);
/// Failed cells are recorded with status "failed" and the run continues;
/// afterwards the error of the first failed cell is rethrown.
void ablation(const Invocation& in);

/// Process exit status for an error code: 1 usage/config, 2 verification,
/// 3 numeric failure.
int exit_code_for(ErrorCode code);

std::string_view version();

}  // namespace lar::cmd
