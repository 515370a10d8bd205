// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "augment/augment.h"

namespace {

int report(aug_status st, const char* what) {
    std::fprintf(stderr, "augment %s: %s: %s\n", what, aug_status_name(st), aug_last_error());
    return 1 + static_cast<int>(st);
}

// Owns a string returned by the library.
struct LibString {
    char* ptr = nullptr;
    ~LibString() { aug_string_free(ptr); }
    const char* c_str() const { return ptr ? ptr : ""; }
};

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string parent_dir(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? "." : path.substr(0, pos);
}

struct PipelineArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold;
    std::optional<int> variations;
    std::optional<std::uint64_t> samples;
    std::string out;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a, bool needs_out = true) {
    cmd->add_option("--config", a.config, "Pipeline config JSON (task + settings)")->required();
    cmd->add_option("--seed", a.seed, "Run seed");
    cmd->add_option("--threshold", a.threshold, "Reference similarity threshold");
    cmd->add_option("--variations", a.variations, "Variations per region");
    cmd->add_option("--samples", a.samples, "Number of generated samples");
    auto* out = cmd->add_option("--out", a.out, "Output directory");
    if (needs_out) out->required();
}

int open_pipeline(const PipelineArgs& a, aug_pipeline** p) {
    const auto text = slurp(a.config);
    if (!text) {
        std::fprintf(stderr, "augment: cannot read config %s\n", a.config.c_str());
        return 1 + AUG_ERR_IO;
    }
    if (auto st = aug_pipeline_create(text->c_str(), parent_dir(a.config).c_str(), p); st != AUG_OK)
        return report(st, "config");
    aug_status st = AUG_OK;
    if (a.seed && st == AUG_OK) st = aug_pipeline_set_seed(*p, *a.seed);
    if (a.threshold && st == AUG_OK) st = aug_pipeline_set_threshold(*p, *a.threshold);
    if (a.variations && st == AUG_OK) st = aug_pipeline_set_variations(*p, *a.variations);
    if (a.samples && st == AUG_OK) st = aug_pipeline_set_samples(*p, *a.samples);
    if (st != AUG_OK) {
        aug_pipeline_free(*p);
        *p = nullptr;
        return report(st, "config");
    }
    return 0;
}

aug_service* running_service = nullptr;

extern "C" void on_signal(int) {
    if (running_service) aug_service_stop(running_service);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-shot segmentation data augmentation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", aug_version());

    PipelineArgs gen_args;
    auto* generate = app.add_subcommand("generate", "Generate an augmented dataset");
    add_pipeline_options(generate, gen_args);

    PipelineArgs cp_args;
    auto* copy_paste = app.add_subcommand("copy-paste", "Generate a copy-paste baseline dataset");
    add_pipeline_options(copy_paste, cp_args);

    std::uint64_t regions = 0, variations = 0, count = 0, key_seed = 0;
    bool count_only = false;
    auto* combine = app.add_subcommand("combine", "Count and list combination keys");
    combine->add_option("--regions,-n", regions, "Number of regions")->required();
    combine->add_option("--variations,-l", variations, "Variations per region")->required();
    combine->add_option("--count", count, "Sample this many distinct keys (0 lists all)");
    combine->add_option("--seed", key_seed, "Sampling seed");
    combine->add_flag("--count-only", count_only, "Print only the size of the space");

    std::string boxes, images, pairs_out;
    auto* extract = app.add_subcommand("extract-pairs", "Build inpainting training pairs from boxes");
    extract->add_option("--boxes", boxes, "Box sidecar file")->required();
    extract->add_option("--images", images, "Directory of <image_id>.png")->required();
    extract->add_option("--out", pairs_out, "Output directory")->required();

    std::string manifest, predictions, method = "prediction", eval_out;
    auto* evaluate = app.add_subcommand("evaluate", "Score prediction masks against a manifest");
    evaluate->add_option("--manifest", manifest, "Dataset manifest (task.json)")->required();
    evaluate->add_option("--predictions", predictions, "Directory of <id>.png masks")->required();
    evaluate->add_option("--method", method, "Method name for the table");
    evaluate->add_option("--out", eval_out, "Write the JSON report here");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a manifest and its files");
    validate->add_option("manifest", validate_path, "Dataset manifest (task.json)")->required();

    PipelineArgs serve_args;
    std::string host = "127.0.0.1";
    int port = 8080;
    bool mock = false;
    auto* serve = app.add_subcommand("serve", "Run the studio HTTP service");
    add_pipeline_options(serve, serve_args);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_flag("--mock-backends", mock, "Also answer /v1/* with the built-in mocks");

    CLI11_PARSE(app, argc, argv);

    if (*generate || *copy_paste) {
        const auto& a = *generate ? gen_args : cp_args;
        aug_pipeline* p = nullptr;
        if (int rc = open_pipeline(a, &p)) return rc;
        LibString summary;
        const auto st = *generate ? aug_pipeline_generate(p, a.out.c_str(), &summary.ptr)
                                  : aug_pipeline_copy_paste(p, a.out.c_str(), &summary.ptr);
        aug_pipeline_free(p);
        if (st != AUG_OK) return report(st, *generate ? "generate" : "copy-paste");
        std::printf("%s\n", summary.c_str());
        return 0;
    }
    if (*combine) {
        std::uint64_t total = 0;
        if (auto st = aug_count_combinations(regions, variations, &total); st != AUG_OK)
            return report(st, "combine");
        std::printf("%llu\n", static_cast<unsigned long long>(total));
        if (count_only) return 0;
        LibString lines;
        if (auto st = aug_combination_keys(regions, variations, count, key_seed, &lines.ptr); st != AUG_OK)
            return report(st, "combine");
        std::fputs(lines.c_str(), stdout);
        return 0;
    }
    if (*extract) {
        std::size_t n = 0;
        if (auto st = aug_extract_pairs(boxes.c_str(), images.c_str(), pairs_out.c_str(), &n); st != AUG_OK)
            return report(st, "extract-pairs");
        std::printf("%zu pairs written to %s\n", n, pairs_out.c_str());
        return 0;
    }
    if (*evaluate) {
        LibString json, table;
        if (auto st = aug_evaluate(manifest.c_str(), predictions.c_str(), method.c_str(), &json.ptr,
                                   &table.ptr);
            st != AUG_OK)
            return report(st, "evaluate");
        if (!eval_out.empty()) {
            std::ofstream out(eval_out, std::ios::binary);
            out << json.c_str() << '\n';
            if (!out) {
                std::fprintf(stderr, "augment evaluate: cannot write %s\n", eval_out.c_str());
                return 1 + AUG_ERR_IO;
            }
        }
        std::fputs(table.c_str(), stdout);
        return 0;
    }
    if (*validate) {
        std::size_t n = 0;
        if (auto st = aug_manifest_validate(validate_path.c_str(), &n); st != AUG_OK)
            return report(st, "validate");
        std::printf("%s: %zu records ok\n", validate_path.c_str(), n);
        return 0;
    }
    if (*serve) {
        aug_pipeline* p = nullptr;
        if (int rc = open_pipeline(serve_args, &p)) return rc;
        aug_service* s = nullptr;
        const auto st = aug_service_create(p, serve_args.out.c_str(), mock ? 1 : 0, &s);
        aug_pipeline_free(p);
        if (st != AUG_OK) return report(st, "serve");
        int bound = 0;
        if (auto bst = aug_service_bind(s, host.c_str(), port, &bound); bst != AUG_OK) {
            aug_service_free(s);
            return report(bst, "serve");
        }
        std::printf("listening on http://%s:%d\n", host.c_str(), bound);
        std::fflush(stdout);
        running_service = s;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        const auto lst = aug_service_listen(s);
        running_service = nullptr;
        aug_service_free(s);
        if (lst != AUG_OK) return report(lst, "serve");
        return 0;
    }
    return 0;
}
