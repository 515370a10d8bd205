// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "augment/combiner.hpp"
#include "augment/imaging.hpp"

namespace augment {

inline constexpr int kManifestVersion = 1;
inline constexpr std::size_t kDefaultSupportSize = 5;
inline constexpr std::size_t kDefaultBasePoolSize = 10;

// Image plus mask, paths relative to the task directory. For support entries
// the mask is the annotation; for base-pool entries it is the placement mask.
struct ImageMaskPair {
    std::string image;
    std::string mask;
    bool operator==(const ImageMaskPair&) const = default;
};

struct FewShotTask {
    std::string class_name;
    std::vector<ImageMaskPair> support;
    std::vector<ImageMaskPair> base_pool;
    bool operator==(const FewShotTask&) const = default;
};

nlohmann::json to_json(const FewShotTask& task);
// Throws Error(validation) if fields are missing or the support set is empty.
FewShotTask task_from_json(const nlohmann::json& j);

enum class SampleOrigin { annotated, generated, copy_paste };

std::string_view to_string(SampleOrigin origin) noexcept;
SampleOrigin parse_sample_origin(std::string_view text);

struct SampleRecord {
    std::string id;
    std::string image_path;
    std::string mask_path;
    SampleOrigin origin = SampleOrigin::annotated;
    std::optional<CombinationKey> combination_key;
    std::vector<double> scores;
    std::string base_id;           // generated samples: source base image
    std::size_t region_count = 0;  // generated samples: N of the source base
    nlohmann::json extra = nlohmann::json::object();  // unknown fields, preserved

    bool operator==(const SampleRecord&) const = default;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json tombstones = nlohmann::json::array();
    bool operator==(const Provenance&) const = default;
};

struct DatasetManifest {
    int version = kManifestVersion;
    FewShotTask task;
    std::vector<SampleRecord> samples;
    Provenance provenance;
    nlohmann::json extra = nlohmann::json::object();

    const SampleRecord* find(std::string_view id) const noexcept;
    bool operator==(const DatasetManifest&) const = default;
};

nlohmann::json to_json(const SampleRecord& record);
nlohmann::json to_json(const DatasetManifest& manifest);
// Structural parse only; throws Error(validation) on schema problems,
// including a version other than kManifestVersion.
DatasetManifest manifest_from_json(const nlohmann::json& j);

// Byte-stable serialisation (sorted keys, 2-space indent, trailing newline).
std::string serialize_manifest(const DatasetManifest& manifest);

// Checks unique ids, key validity, that every file exists under `root` and
// that each record's image and mask dimensions agree. Throws
// Error(validation) naming the offending record.
void validate_manifest(const DatasetManifest& manifest, const std::filesystem::path& root);

// load = parse + validate against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// FNV-1a 64 over the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

// Self-supervised inpainting pair built from one detection box.
struct TrainingPair {
    RasterImage masked_base;  // image with the box blanked to black
    RasterImage reference;    // patch inside the box
    BitMask mask;             // filled box
    RasterImage target;       // original image
};

std::vector<TrainingPair> extract_training_pairs(const RasterImage& image,
                                                 std::span<const Rect> boxes);

struct DetectionBox {
    std::string image_id;
    Rect box;
};

// Sidecar format: one box per line, "image_id x y w h". Blank lines and lines
// starting with '#' are ignored.
std::vector<DetectionBox> parse_boxes(std::string_view text);

// A composite ready for export.
struct GeneratedSample {
    AugmentedSample sample;
    std::string base_id;
    std::size_t region_count = 0;
    std::uint64_t seed = 0;  // run seed the variations came from
    SampleOrigin origin = SampleOrigin::generated;
};

std::string sample_id(const GeneratedSample& s);

// Writes the support set, base pool and samples under out_dir (refs/, masks/,
// images/) plus task.json. `source_root` resolves the task's paths. Support
// records come first, then samples in the given order.
DatasetManifest export_augmented(const FewShotTask& task, const std::filesystem::path& source_root,
                                 std::span<const GeneratedSample> samples,
                                 const Provenance& provenance,
                                 const std::filesystem::path& out_dir);

// Writes one sample's PNGs under root and returns its record.
SampleRecord write_sample(const GeneratedSample& s, const std::filesystem::path& root);

} // namespace augment
