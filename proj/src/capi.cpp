// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/augment.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "augment/codec.hpp"
#include "augment/combiner.hpp"
#include "augment/dataset.hpp"
#include "augment/error.hpp"
#include "augment/evaluation.hpp"
#include "augment/mock_backend.hpp"
#include "augment/pipeline.hpp"
#include "augment/regions.hpp"
#include "augment/service.hpp"
#include "augment/wire.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

struct aug_image {
    augment::RasterImage value;
};

struct aug_mask {
    augment::BitMask value;
};

struct aug_pipeline {
    augment::FewShotTask task;
    fs::path base_dir;
    augment::PipelineConfig cfg;
};

struct aug_service {
    std::unique_ptr<augment::PipelineService> service;
};

namespace {

thread_local std::string last_error;

aug_status status_for(augment::ErrorKind kind) {
    using augment::ErrorKind;
    switch (kind) {
    case ErrorKind::geometry: return AUG_ERR_GEOMETRY;
    case ErrorKind::validation: return AUG_ERR_VALIDATION;
    case ErrorKind::protocol: return AUG_ERR_PROTOCOL;
    case ErrorKind::transport: return AUG_ERR_TRANSPORT;
    case ErrorKind::remote: return AUG_ERR_REMOTE;
    case ErrorKind::numeric: return AUG_ERR_NUMERIC;
    case ErrorKind::config: return AUG_ERR_CONFIG;
    case ErrorKind::overflow: return AUG_ERR_OVERFLOW;
    case ErrorKind::io: return AUG_ERR_IO;
    case ErrorKind::not_found: return AUG_ERR_NOT_FOUND;
    }
    return AUG_ERR_INTERNAL;
}

aug_status fail(aug_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <class Fn>
aug_status guarded(Fn&& fn) {
    try {
        fn();
        return AUG_OK;
    } catch (const augment::Error& e) {
        return fail(status_for(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(AUG_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(AUG_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(AUG_ERR_INTERNAL, "unknown exception");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define AUG_REQUIRE(p)                                                                 \
    do {                                                                               \
        if ((p) == nullptr) return fail(AUG_ERR_INVALID_ARGUMENT, #p " must not be NULL"); \
    } while (0)

json summary_json(const augment::DatasetManifest& m, const fs::path& out_dir) {
    std::map<std::string, std::size_t> by_origin;
    for (const auto& r : m.samples) ++by_origin[std::string(augment::to_string(r.origin))];
    return {{"out_dir", out_dir.string()},
            {"records", m.samples.size()},
            {"by_origin", by_origin},
            {"config_hash", m.provenance.config_hash}};
}

} // namespace

extern "C" {

const char* aug_status_name(aug_status status) {
    switch (status) {
    case AUG_OK: return "ok";
    case AUG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AUG_ERR_GEOMETRY: return "geometry";
    case AUG_ERR_VALIDATION: return "validation";
    case AUG_ERR_PROTOCOL: return "protocol";
    case AUG_ERR_TRANSPORT: return "transport";
    case AUG_ERR_REMOTE: return "remote";
    case AUG_ERR_NUMERIC: return "numeric";
    case AUG_ERR_CONFIG: return "config";
    case AUG_ERR_OVERFLOW: return "overflow";
    case AUG_ERR_IO: return "io";
    case AUG_ERR_NOT_FOUND: return "not_found";
    case AUG_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* aug_last_error(void) { return last_error.c_str(); }

const char* aug_version(void) { return "0.1.0"; }

void aug_string_free(char* str) { std::free(str); }

aug_status aug_image_load(const char* path, aug_image** out) {
    AUG_REQUIRE(path);
    AUG_REQUIRE(out);
    return guarded([&] { *out = new aug_image{augment::read_png_image(path)}; });
}

aug_status aug_image_save(const aug_image* image, const char* path) {
    AUG_REQUIRE(image);
    AUG_REQUIRE(path);
    return guarded([&] { augment::write_png(image->value, path); });
}

int aug_image_width(const aug_image* image) { return image ? image->value.width() : 0; }
int aug_image_height(const aug_image* image) { return image ? image->value.height() : 0; }
void aug_image_free(aug_image* image) { delete image; }

aug_status aug_mask_load(const char* path, aug_mask** out) {
    AUG_REQUIRE(path);
    AUG_REQUIRE(out);
    return guarded([&] { *out = new aug_mask{augment::read_png_mask(path)}; });
}

aug_status aug_mask_save(const aug_mask* mask, const char* path) {
    AUG_REQUIRE(mask);
    AUG_REQUIRE(path);
    return guarded([&] { augment::write_png(mask->value, path); });
}

int aug_mask_width(const aug_mask* mask) { return mask ? mask->value.width() : 0; }
int aug_mask_height(const aug_mask* mask) { return mask ? mask->value.height() : 0; }

aug_status aug_mask_coverage(const aug_mask* mask, double* out) {
    AUG_REQUIRE(mask);
    AUG_REQUIRE(out);
    return guarded([&] { *out = augment::mask_coverage(mask->value); });
}

void aug_mask_free(aug_mask* mask) { delete mask; }

aug_status aug_extract_regions(const aug_mask* placement, double band_low, double band_high,
                               char** out_json) {
    AUG_REQUIRE(placement);
    AUG_REQUIRE(out_json);
    return guarded([&] {
        const auto regions =
            augment::extract_regions(placement->value, augment::CoverageBand{band_low, band_high});
        json arr = json::array();
        for (const auto& r : regions) {
            arr.push_back({{"index", r.index},
                           {"rect", augment::wire::to_json(r.rect)},
                           {"component_bbox", augment::wire::to_json(r.component_bbox)},
                           {"pixels", augment::popcount(r.region_mask)},
                           {"coverage", r.coverage},
                           {"feasible", r.feasible}});
        }
        *out_json = dup_string(arr.dump(2));
    });
}

aug_status aug_count_combinations(uint64_t regions, uint64_t variations, uint64_t* out) {
    AUG_REQUIRE(out);
    return guarded([&] { *out = augment::count_combinations(regions, variations); });
}

aug_status aug_combination_keys(uint64_t regions, uint64_t variations, uint64_t count,
                                uint64_t seed, char** out_lines) {
    AUG_REQUIRE(out_lines);
    return guarded([&] {
        augment::count_combinations(regions, variations);
        const auto keys = count == 0 ? augment::enumerate_keys(regions, variations)
                                     : augment::sample_keys(regions, variations, count, seed);
        std::string text;
        for (const auto& k : keys) {
            text += augment::to_string(k);
            text += '\n';
        }
        *out_lines = dup_string(text);
    });
}

aug_status aug_extract_pairs(const char* boxes_path, const char* images_dir, const char* out_dir,
                             size_t* out_pairs) {
    AUG_REQUIRE(boxes_path);
    AUG_REQUIRE(images_dir);
    AUG_REQUIRE(out_dir);
    return guarded([&] {
        const auto bytes = augment::read_file(boxes_path);
        const auto boxes =
            augment::parse_boxes(bytes);
        std::map<std::string, std::vector<augment::Rect>> by_image;
        for (const auto& b : boxes) by_image[b.image_id].push_back(b.box);
        const fs::path out(out_dir);
        for (const char* sub : {"masked", "references", "masks", "targets"}) fs::create_directories(out / sub);
        std::size_t written = 0;
        for (const auto& [id, rects] : by_image) {
            const auto image = augment::read_png_image(fs::path(images_dir) / (id + ".png"));
            std::vector<augment::TrainingPair> pairs;
            try {
                pairs = augment::extract_training_pairs(image, rects);
            } catch (augment::Error& e) {
                throw e.with_context("image " + id);
            }
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const std::string name = id + "_" + std::to_string(i) + ".png";
                augment::write_png(pairs[i].masked_base, out / "masked" / name);
                augment::write_png(pairs[i].reference, out / "references" / name);
                augment::write_png(pairs[i].mask, out / "masks" / name);
                augment::write_png(pairs[i].target, out / "targets" / name);
                ++written;
            }
        }
        if (out_pairs) *out_pairs = written;
    });
}

aug_status aug_manifest_validate(const char* manifest_path, size_t* out_records) {
    AUG_REQUIRE(manifest_path);
    return guarded([&] {
        const fs::path path(manifest_path);
        const auto m = augment::load_manifest(path);
        augment::validate_manifest(m, path.parent_path());
        if (out_records) *out_records = m.samples.size();
    });
}

aug_status aug_evaluate(const char* manifest_path, const char* predictions_dir, const char* method,
                        char** out_report_json, char** out_table) {
    AUG_REQUIRE(manifest_path);
    AUG_REQUIRE(predictions_dir);
    return guarded([&] {
        const fs::path path(manifest_path);
        const auto m = augment::load_manifest(path);
        std::vector<augment::Prediction> preds;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(predictions_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) preds.emplace_back(f.stem().string(), augment::read_png_mask(f));
        auto report = augment::evaluate(preds, m, path.parent_path());
        if (out_report_json) {
            json j = augment::to_json(report);
            j["method"] = method ? method : "";
            *out_report_json = dup_string(j.dump(2));
        }
        if (out_table) {
            std::vector<std::pair<std::string, augment::IouReport>> rows;
            rows.emplace_back(method ? method : "prediction", std::move(report));
            *out_table = dup_string(augment::format_iou_table(rows));
        }
    });
}

aug_status aug_pipeline_create(const char* config_json, const char* base_dir, aug_pipeline** out) {
    AUG_REQUIRE(config_json);
    AUG_REQUIRE(out);
    return guarded([&] {
        json j;
        try {
            j = json::parse(config_json);
        } catch (const json::exception& e) {
            throw augment::Error(augment::ErrorKind::config, std::string("malformed config JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("task"))
            throw augment::Error(augment::ErrorKind::config, "config needs a \"task\" object or path");
        fs::path base = base_dir ? fs::path(base_dir) : fs::current_path();
        auto p = std::make_unique<aug_pipeline>();
        if (j["task"].is_string()) {
            const fs::path task_path = base / j["task"].get<std::string>();
            const auto bytes = augment::read_file(task_path);
            json tj;
            try {
                tj = json::parse(bytes.begin(), bytes.end());
            } catch (const json::exception& e) {
                throw augment::Error(augment::ErrorKind::config,
                                     task_path.string() + ": malformed JSON: " + e.what());
            }
            // A manifest carries its task under "task".
            if (tj.contains("task") && tj["task"].is_object()) tj = tj["task"];
            p->task = augment::task_from_json(tj);
            p->base_dir = task_path.parent_path();
        } else {
            p->task = augment::task_from_json(j["task"]);
            p->base_dir = base;
        }
        p->cfg = augment::pipeline_config_from_json(j);
        *out = p.release();
    });
}

aug_status aug_pipeline_set_seed(aug_pipeline* pipeline, uint64_t seed) {
    AUG_REQUIRE(pipeline);
    pipeline->cfg.seed = seed;
    return AUG_OK;
}

aug_status aug_pipeline_set_threshold(aug_pipeline* pipeline, double threshold) {
    AUG_REQUIRE(pipeline);
    return guarded([&] {
        auto cfg = pipeline->cfg;
        cfg.generation.similarity_threshold = threshold;
        cfg.validate();
        pipeline->cfg = cfg;
    });
}

aug_status aug_pipeline_set_variations(aug_pipeline* pipeline, int variations) {
    AUG_REQUIRE(pipeline);
    return guarded([&] {
        auto cfg = pipeline->cfg;
        cfg.generation.variations_per_region = variations;
        cfg.validate();
        pipeline->cfg = cfg;
    });
}

aug_status aug_pipeline_set_samples(aug_pipeline* pipeline, uint64_t samples) {
    AUG_REQUIRE(pipeline);
    pipeline->cfg.samples = samples;
    return AUG_OK;
}

aug_status aug_pipeline_config(const aug_pipeline* pipeline, char** out_json) {
    AUG_REQUIRE(pipeline);
    AUG_REQUIRE(out_json);
    return guarded([&] {
        json j = augment::to_json(pipeline->cfg);
        j["task"] = augment::to_json(pipeline->task);
        *out_json = dup_string(j.dump(2));
    });
}

aug_status aug_pipeline_generate(aug_pipeline* pipeline, const char* out_dir, char** out_summary_json) {
    AUG_REQUIRE(pipeline);
    AUG_REQUIRE(out_dir);
    return guarded([&] {
        const auto backends = augment::make_backends(pipeline->cfg);
        const auto m = augment::run_pipeline(pipeline->task, pipeline->base_dir, pipeline->cfg, backends, out_dir);
        if (out_summary_json) *out_summary_json = dup_string(summary_json(m, out_dir).dump(2));
    });
}

aug_status aug_pipeline_copy_paste(aug_pipeline* pipeline, const char* out_dir, char** out_summary_json) {
    AUG_REQUIRE(pipeline);
    AUG_REQUIRE(out_dir);
    return guarded([&] {
        const auto m = augment::run_copy_paste(pipeline->task, pipeline->base_dir, pipeline->cfg, out_dir);
        if (out_summary_json) *out_summary_json = dup_string(summary_json(m, out_dir).dump(2));
    });
}

void aug_pipeline_free(aug_pipeline* pipeline) { delete pipeline; }

aug_status aug_service_create(const aug_pipeline* pipeline, const char* task_dir, int mock_backends,
                              aug_service** out) {
    AUG_REQUIRE(pipeline);
    AUG_REQUIRE(task_dir);
    AUG_REQUIRE(out);
    return guarded([&] {
        augment::init_task_dir(pipeline->task, pipeline->base_dir, pipeline->cfg, task_dir);
        augment::ServiceConfig cfg;
        cfg.pipeline = pipeline->cfg;
        cfg.mount_mock_backends = mock_backends != 0;
        auto s = std::make_unique<aug_service>();
        s->service = std::make_unique<augment::PipelineService>(task_dir, cfg,
                                                                augment::make_backends(pipeline->cfg));
        *out = s.release();
    });
}

aug_status aug_service_bind(aug_service* service, const char* host, int port, int* out_port) {
    AUG_REQUIRE(service);
    AUG_REQUIRE(host);
    return guarded([&] {
        const int bound = service->service->bind(host, port);
        if (out_port) *out_port = bound;
    });
}

aug_status aug_service_listen(aug_service* service) {
    AUG_REQUIRE(service);
    return guarded([&] { service->service->listen(); });
}

void aug_service_stop(aug_service* service) {
    if (service) service->service->stop();
}

void aug_service_free(aug_service* service) { delete service; }

} // extern "C"
