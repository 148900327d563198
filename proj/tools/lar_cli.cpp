#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lar/lar_c.h"

namespace {

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config;
    std::string out;
    std::string dataset;
    std::string checkpoint;
    std::optional<std::string> seed;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // config key -> value given on the command line
};

std::vector<std::string> command_keys(const char* command) {
    std::vector<std::string> keys;
    const char* joined = lar_command_keys(command);
    if (!joined) return keys;
    std::istringstream in(joined);
    std::string key;
    while (std::getline(in, key)) {
        if (!key.empty()) keys.push_back(key);
    }
    return keys;
}

void add_subcommand(CLI::App& app, Subcommand& sub, const char* name, const char* description, bool needs_dataset,
                    bool needs_checkpoint) {
    sub.app = app.add_subcommand(name, description);
    sub.app->add_option("--config", sub.config, "key = value config file");
    sub.app->add_option("--out", sub.out, "output directory")->required();
    sub.app->add_option("--set", sub.sets, "extra key=value override (repeatable)");
    if (needs_dataset) sub.app->add_option("--dataset", sub.dataset, "dataset directory")->required();
    if (needs_checkpoint) sub.app->add_option("--checkpoint", sub.checkpoint, "model checkpoint")->required();
    for (const std::string& key : command_keys(name)) {
        if (key == "seed") {
            sub.app->add_option("--seed", sub.seed, "random seed");
            continue;
        }
        sub.app->add_option_function<std::string>(
            "--" + key, [&sub, key](const std::string& v) { sub.flags[key] = v; }, "config key " + key);
    }
}

void print_log(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Label-aware ranked metric learning toolkit"};
    app.set_version_flag("--version", std::string(lar_version()));
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "suppress progress output");

    Subcommand verify, synth, train, evaluate, ablation;
    add_subcommand(app, verify, "verify-geometry", "optimize class configurations and check the angle inequalities",
                   false, false);
    add_subcommand(app, synth, "synth", "synthesize a labeled radar dataset", false, false);
    add_subcommand(app, train, "train", "train one loss configuration", true, false);
    add_subcommand(app, evaluate, "evaluate", "evaluate a checkpoint on a dataset split", true, true);
    add_subcommand(app, ablation, "ablation", "run every loss setting with and without smoothing", true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!quiet) lar_set_log(print_log, nullptr);
    for (Subcommand* sub : {&verify, &synth, &train, &evaluate, &ablation}) {
        if (!sub->app->parsed()) continue;
        std::vector<std::string> overrides = sub->sets;
        for (const auto& [k, v] : sub->flags) overrides.push_back(k + "=" + v);
        if (sub->seed) overrides.push_back("seed=" + *sub->seed);
        std::vector<const char*> ptrs;
        for (const std::string& o : overrides) ptrs.push_back(o.c_str());
        const lar_status s = lar_cmd_run(sub->app->get_name().c_str(), sub->config.empty() ? nullptr : sub->config.c_str(),
                                         ptrs.data(), static_cast<int>(ptrs.size()),
                                         sub->dataset.empty() ? nullptr : sub->dataset.c_str(),
                                         sub->checkpoint.empty() ? nullptr : sub->checkpoint.c_str(), sub->out.c_str());
        if (s != LAR_OK) {
            std::fprintf(stderr, "error [%s]: %s\n", lar_status_name(s), lar_last_error());
            return lar_exit_code(s);
        }
        return 0;
    }
    return 1;
}
