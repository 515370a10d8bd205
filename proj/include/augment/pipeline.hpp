// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "augment/combiner.hpp"
#include "augment/dataset.hpp"
#include "augment/generation.hpp"
#include "augment/http_backend.hpp"
#include "augment/regions.hpp"

namespace augment {

enum class BackendMode { mock, http };

struct PipelineConfig {
    GenerationConfig generation;
    CoverageBand band;
    std::uint64_t seed = 0;
    std::size_t samples = 1000;  // target number of generated samples per task
    BackendMode backend_mode = BackendMode::mock;
    HttpBackendsConfig http;

    void validate() const;
};

// Missing keys keep their defaults. Throws Error(config) on bad values.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);

Backends make_backends(const PipelineConfig& cfg);

// Support images cropped to the bounding box of their annotation masks; the
// whole image when the mask is empty.
std::vector<RasterImage> load_references(const FewShotTask& task,
                                         const std::filesystem::path& root);

// All variations for one base image.
struct BaseGeneration {
    std::string base_id;
    RasterImage base;
    BitMask placement;
    std::vector<RegionSpec> regions;
    std::vector<std::vector<Variation>> variations;  // [region][variation]
};

BaseGeneration generate_for_base(std::string base_id, RasterImage base, BitMask placement,
                                 std::span<const RasterImage> references,
                                 const PipelineConfig& cfg, const Backends& backends,
                                 const RunSeed& seed, const ProgressFn& progress = {});

// Splits `total` across spaces of the given sizes as evenly as possible,
// never exceeding a space; leftovers move to later spaces.
std::vector<std::size_t> allocate_quota(std::size_t total, std::span<const std::uint64_t> sizes);

// Full batch run: regions, variations, sampled combinations and export.
DatasetManifest run_pipeline(const FewShotTask& task, const std::filesystem::path& task_root,
                             const PipelineConfig& cfg, const Backends& backends,
                             const std::filesystem::path& out_dir);

// Copy-paste baseline with the same sample budget: each sample takes base
// image i mod |pool| and pastes a randomly chosen support object (cropped to
// its annotation) into the bbox of every placement component.
DatasetManifest run_copy_paste(const FewShotTask& task, const std::filesystem::path& task_root,
                               const PipelineConfig& cfg, const std::filesystem::path& out_dir);

} // namespace augment
