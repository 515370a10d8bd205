// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>

#include <spdlog/spdlog.h>

#include "augment/codec.hpp"
#include "augment/error.hpp"
#include "augment/mock_backend.hpp"

namespace augment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string base_id_for(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "base_%03zu", i);
    return buf;
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("config field \"") + key + "\": " + e.what());
    }
}

BackendConfig backend_from_json(const json& j, BackendConfig cfg) {
    if (!j.is_object()) return cfg;
    read_opt(j, "endpoint", cfg.endpoint);
    read_opt(j, "timeout_ms", cfg.timeout_ms);
    read_opt(j, "max_retries", cfg.max_retries);
    read_opt(j, "max_in_flight", cfg.max_in_flight);
    read_opt(j, "bearer_token", cfg.bearer_token);
    return cfg;
}

json backend_to_json(const BackendConfig& cfg) {
    // The bearer token is a secret and stays out of manifests.
    return {{"endpoint", cfg.endpoint},
            {"timeout_ms", cfg.timeout_ms},
            {"max_retries", cfg.max_retries},
            {"max_in_flight", cfg.max_in_flight}};
}

std::uint64_t space_size_or_max(std::size_t regions, std::size_t variations) {
    if (regions == 0) return 0;
    return ChoiceSpace(regions, variations).size().value_or(std::numeric_limits<std::uint64_t>::max());
}

} // namespace

void PipelineConfig::validate() const {
    generation.validate();
    if (!(band.low > 0.0 && band.low < band.high && band.high <= 1.0))
        throw Error(ErrorKind::config, "coverage band must satisfy 0 < low < high <= 1");
    if (backend_mode == BackendMode::http) {
        http.inpaint.validate();
        http.embed.validate();
        http.segment.validate();
    }
}

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig cfg;
    cfg.http.inpaint.endpoint = cfg.http.embed.endpoint = cfg.http.segment.endpoint =
        "http://127.0.0.1:7860";
    if (!j.is_object()) throw Error(ErrorKind::config, "pipeline config must be a JSON object");
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "samples", cfg.samples);
    if (j.contains("band")) {
        const auto& b = j["band"];
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw Error(ErrorKind::config, "band must be [low, high]");
        cfg.band = {b[0].get<double>(), b[1].get<double>()};
    }
    if (j.contains("generation")) {
        const auto& g = j["generation"];
        read_opt(g, "variations_per_region", cfg.generation.variations_per_region);
        read_opt(g, "similarity_threshold", cfg.generation.similarity_threshold);
        read_opt(g, "max_attempts", cfg.generation.max_attempts);
        read_opt(g, "dilation_radius", cfg.generation.dilation_radius);
        read_opt(g, "min_refined_fraction", cfg.generation.min_refined_fraction);
        read_opt(g, "workers", cfg.generation.workers);
    }
    if (j.contains("backends")) {
        const auto& b = j["backends"];
        std::string mode = "mock";
        read_opt(b, "mode", mode);
        if (mode == "mock") cfg.backend_mode = BackendMode::mock;
        else if (mode == "http") cfg.backend_mode = BackendMode::http;
        else throw Error(ErrorKind::config, "backends.mode must be \"mock\" or \"http\"");
        if (b.contains("inpaint")) cfg.http.inpaint = backend_from_json(b["inpaint"], cfg.http.inpaint);
        if (b.contains("embed")) cfg.http.embed = backend_from_json(b["embed"], cfg.http.embed);
        if (b.contains("segment")) cfg.http.segment = backend_from_json(b["segment"], cfg.http.segment);
    }
    cfg.validate();
    return cfg;
}

json to_json(const PipelineConfig& cfg) {
    const auto& g = cfg.generation;
    return {{"seed", cfg.seed},
            {"samples", cfg.samples},
            {"band", {cfg.band.low, cfg.band.high}},
            {"generation",
             {{"variations_per_region", g.variations_per_region},
              {"similarity_threshold", g.similarity_threshold},
              {"max_attempts", g.max_attempts},
              {"dilation_radius", g.dilation_radius},
              {"min_refined_fraction", g.min_refined_fraction},
              {"workers", g.workers}}},
            {"backends",
             {{"mode", cfg.backend_mode == BackendMode::mock ? "mock" : "http"},
              {"inpaint", backend_to_json(cfg.http.inpaint)},
              {"embed", backend_to_json(cfg.http.embed)},
              {"segment", backend_to_json(cfg.http.segment)}}}};
}

Backends make_backends(const PipelineConfig& cfg) {
    if (cfg.backend_mode == BackendMode::mock) return make_mock_backends();
    return make_http_backends(cfg.http);
}

std::vector<RasterImage> load_references(const FewShotTask& task, const fs::path& root) {
    std::vector<RasterImage> refs;
    for (const auto& s : task.support) {
        RasterImage img = read_png_image(root / s.image);
        const BitMask mask = read_png_mask(root / s.mask);
        if (mask.width() != img.width() || mask.height() != img.height())
            throw Error(ErrorKind::validation, "support image " + s.image + " and mask " + s.mask +
                                                   " differ in size");
        if (const auto box = bounding_box(mask)) img = crop(img, *box);
        refs.push_back(std::move(img));
    }
    return refs;
}

BaseGeneration generate_for_base(std::string base_id, RasterImage base, BitMask placement,
                                 std::span<const RasterImage> references,
                                 const PipelineConfig& cfg, const Backends& backends,
                                 const RunSeed& seed, const ProgressFn& progress) {
    BaseGeneration out{std::move(base_id), std::move(base), std::move(placement), {}, {}};
    out.regions = extract_regions(out.base, out.placement, cfg.band);
    const std::size_t per_region = static_cast<std::size_t>(cfg.generation.variations_per_region);
    const std::size_t total = out.regions.size() * per_region;
    for (const auto& region : out.regions) {
        const std::size_t before = out.variations.size() * per_region;
        ProgressFn region_progress;
        if (progress)
            region_progress = [&](std::size_t done, std::size_t) { progress(before + done, total); };
        try {
            out.variations.push_back(generate_region_variations(
                region, out.base, references, cfg.generation, backends, seed, region_progress));
        } catch (const Error& e) {
            throw e.with_context(out.base_id);
        }
    }
    return out;
}

std::vector<std::size_t> allocate_quota(std::size_t total, std::span<const std::uint64_t> sizes) {
    std::vector<std::size_t> quota(sizes.size(), 0);
    std::size_t remaining = total;
    for (;;) {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < sizes.size(); ++i)
            if (quota[i] < sizes[i]) open.push_back(i);
        if (remaining == 0 || open.empty()) break;
        const std::size_t share = remaining / open.size();
        if (share == 0) {
            // Fewer units than open spaces: one each to the earliest.
            for (std::size_t k = 0; k < remaining; ++k) ++quota[open[k]];
            break;
        }
        for (const std::size_t i : open) {
            const auto give = static_cast<std::size_t>(std::min<std::uint64_t>(share, sizes[i] - quota[i]));
            quota[i] += give;
            remaining -= give;
        }
    }
    return quota;
}

DatasetManifest run_pipeline(const FewShotTask& task, const fs::path& task_root,
                             const PipelineConfig& cfg, const Backends& backends,
                             const fs::path& out_dir) {
    cfg.validate();
    if (task.base_pool.empty()) throw Error(ErrorKind::config, "task has no base images");
    const auto references = load_references(task, task_root);
    const RunSeed root{cfg.seed};
    const auto per_region = static_cast<std::size_t>(cfg.generation.variations_per_region);

    std::vector<BaseGeneration> generations;
    std::vector<std::uint64_t> sizes;
    for (std::size_t b = 0; b < task.base_pool.size(); ++b) {
        const auto& entry = task.base_pool[b];
        auto gen = generate_for_base(base_id_for(b), read_png_image(task_root / entry.image),
                                     read_png_mask(task_root / entry.mask), references, cfg,
                                     backends, root.child(b));
        spdlog::info("{}: {} region(s), {} variation(s) each", gen.base_id, gen.regions.size(),
                     per_region);
        sizes.push_back(space_size_or_max(gen.regions.size(), per_region));
        generations.push_back(std::move(gen));
    }
    const auto quota = allocate_quota(cfg.samples, sizes);

    Provenance prov;
    prov.seed = cfg.seed;
    prov.config = to_json(cfg);
    prov.config_hash = config_hash(prov.config);
    DatasetManifest manifest = export_augmented(task, task_root, {}, prov, out_dir);

    for (std::size_t b = 0; b < generations.size(); ++b) {
        const auto& gen = generations[b];
        if (quota[b] == 0) continue;
        const auto keys = sample_keys(gen.regions.size(), per_region, quota[b],
                                      mix64(root.child(b).root ^ 0x6b6579735f736565ULL));
        for (const auto& key : keys) {
            GeneratedSample s{realize(gen.base, gen.regions, gen.variations, key), gen.base_id,
                              gen.regions.size(), cfg.seed, SampleOrigin::generated};
            manifest.samples.push_back(write_sample(s, out_dir));
        }
    }
    validate_manifest(manifest, out_dir);
    save_manifest(manifest, out_dir / "task.json");
    return manifest;
}

DatasetManifest run_copy_paste(const FewShotTask& task, const fs::path& task_root,
                               const PipelineConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    if (task.base_pool.empty()) throw Error(ErrorKind::config, "task has no base images");
    std::vector<Instance> instances;
    for (const auto& s : task.support) {
        RasterImage img = read_png_image(task_root / s.image);
        BitMask mask = read_png_mask(task_root / s.mask);
        if (const auto box = bounding_box(mask)) {
            img = crop(img, *box);
            mask = crop(mask, *box);
        }
        instances.push_back({std::move(img), std::move(mask)});
    }

    Provenance prov;
    prov.seed = cfg.seed;
    prov.config = to_json(cfg);
    prov.config["copy_paste"] = true;
    prov.config_hash = config_hash(prov.config);
    DatasetManifest manifest = export_augmented(task, task_root, {}, prov, out_dir);

    std::vector<RasterImage> bases;
    std::vector<std::vector<Rect>> placements;
    for (const auto& entry : task.base_pool) {
        bases.push_back(read_png_image(task_root / entry.image));
        std::vector<Rect> rects;
        for (const auto& region : extract_regions(read_png_mask(task_root / entry.mask), cfg.band))
            rects.push_back(region.component_bbox);
        placements.push_back(std::move(rects));
    }

    const RunSeed root{cfg.seed};
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const std::size_t b = i % bases.size();
        const std::uint64_t seed = root.derive(b, i, 0);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, instances.size() - 1);
        std::vector<Instance> chosen;
        const std::size_t count = std::max<std::size_t>(1, placements[b].size());
        for (std::size_t k = 0; k < count; ++k) chosen.push_back(instances[pick(rng)]);
        const RasterImage& base = bases[b];
        GeneratedSample s{copy_paste_augment(base, BitMask(base.width(), base.height()), chosen,
                                             placements[b], rng()),
                          base_id_for(b), placements[b].size(), seed, SampleOrigin::copy_paste};
        manifest.samples.push_back(write_sample(s, out_dir));
    }
    validate_manifest(manifest, out_dir);
    save_manifest(manifest, out_dir / "task.json");
    return manifest;
}

} // namespace augment
