// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/dataset.hpp"

#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "augment/codec.hpp"
#include "augment/error.hpp"

namespace augment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
    throw Error(ErrorKind::validation, "manifest: " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema_error(where + " is missing \"" + key + "\"");
    return j.at(key);
}

std::string require_string(const json& j, const char* key, const std::string& where) {
    const auto& v = require(j, key, where);
    if (!v.is_string()) schema_error(where + " field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

json pairs_to_json(const std::vector<ImageMaskPair>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back({{"image", p.image}, {"mask", p.mask}});
    return arr;
}

std::vector<ImageMaskPair> pairs_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) schema_error(where + " must be an array");
    std::vector<ImageMaskPair> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        out.push_back({require_string(arr[i], "image", at), require_string(arr[i], "mask", at)});
    }
    return out;
}

const std::set<std::string> kRecordKeys = {"id",     "image",   "mask",    "origin",
                                           "scores", "base_id", "region_count",
                                           "combination_key"};
const std::set<std::string> kTopKeys = {"version", "task", "samples", "provenance"};

json record_to_json(const SampleRecord& r) {
    json j = r.extra.is_object() ? r.extra : json::object();
    j["id"] = r.id;
    j["image"] = r.image_path;
    j["mask"] = r.mask_path;
    j["origin"] = std::string(to_string(r.origin));
    j["scores"] = r.scores;
    if (r.combination_key) j["combination_key"] = to_string(*r.combination_key);
    if (!r.base_id.empty()) j["base_id"] = r.base_id;
    if (r.region_count != 0) j["region_count"] = r.region_count;
    return j;
}

SampleRecord record_from_json(const json& j, std::size_t index) {
    const std::string where = "samples[" + std::to_string(index) + "]";
    if (!j.is_object()) schema_error(where + " must be an object");
    SampleRecord r;
    r.id = require_string(j, "id", where);
    const std::string rec = "record \"" + r.id + "\"";
    r.image_path = require_string(j, "image", rec);
    r.mask_path = require_string(j, "mask", rec);
    try {
        r.origin = parse_sample_origin(require_string(j, "origin", rec));
        if (j.contains("combination_key"))
            r.combination_key = parse_combination_key(require_string(j, "combination_key", rec));
    } catch (const Error& e) {
        schema_error(rec + ": " + e.what());
    }
    if (j.contains("scores")) {
        if (!j["scores"].is_array()) schema_error(rec + " scores must be an array");
        for (const auto& s : j["scores"]) {
            if (!s.is_number()) schema_error(rec + " scores must be numbers");
            r.scores.push_back(s.get<double>());
        }
    }
    if (j.contains("base_id")) r.base_id = require_string(j, "base_id", rec);
    if (j.contains("region_count")) {
        if (!j["region_count"].is_number_unsigned()) schema_error(rec + " region_count must be an unsigned integer");
        r.region_count = j["region_count"].get<std::size_t>();
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kRecordKeys.contains(it.key())) r.extra[it.key()] = it.value();
    return r;
}

std::string indexed(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void check_pair_file(const fs::path& root, const std::string& rel, const std::string& who) {
    if (!fs::exists(root / rel))
        throw Error(ErrorKind::validation, who + " references missing file " + rel);
}

void check_dimensions(const fs::path& root, const std::string& image, const std::string& mask,
                      const std::string& who) {
    check_pair_file(root, image, who);
    check_pair_file(root, mask, who);
    Extent a, b;
    try {
        a = png_extent(root / image);
        b = png_extent(root / mask);
    } catch (const Error& e) {
        throw Error(ErrorKind::validation, who + ": " + e.what());
    }
    if (!(a == b))
        throw Error(ErrorKind::validation,
                    who + " image is " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                        " but mask is " + std::to_string(b.width) + "x" + std::to_string(b.height));
}

} // namespace

std::string_view to_string(SampleOrigin origin) noexcept {
    switch (origin) {
    case SampleOrigin::annotated: return "annotated";
    case SampleOrigin::generated: return "generated";
    case SampleOrigin::copy_paste: return "copy_paste";
    }
    return "unknown";
}

SampleOrigin parse_sample_origin(std::string_view text) {
    if (text == "annotated") return SampleOrigin::annotated;
    if (text == "generated") return SampleOrigin::generated;
    if (text == "copy_paste") return SampleOrigin::copy_paste;
    throw Error(ErrorKind::validation, "unknown sample origin \"" + std::string(text) + "\"");
}

json to_json(const FewShotTask& task) {
    return {{"class_name", task.class_name},
            {"support", pairs_to_json(task.support)},
            {"base_pool", pairs_to_json(task.base_pool)}};
}

FewShotTask task_from_json(const json& j) {
    FewShotTask t;
    t.class_name = require_string(j, "class_name", "task");
    t.support = pairs_from_json(require(j, "support", "task"), "task.support");
    if (j.contains("base_pool")) t.base_pool = pairs_from_json(j["base_pool"], "task.base_pool");
    if (t.support.empty()) schema_error("task support set is empty");
    return t;
}

const SampleRecord* DatasetManifest::find(std::string_view id) const noexcept {
    for (const auto& s : samples)
        if (s.id == id) return &s;
    return nullptr;
}

json to_json(const SampleRecord& record) { return record_to_json(record); }

json to_json(const DatasetManifest& m) {
    json j = m.extra.is_object() ? m.extra : json::object();
    j["version"] = m.version;
    j["task"] = to_json(m.task);
    json samples = json::array();
    for (const auto& s : m.samples) samples.push_back(record_to_json(s));
    j["samples"] = std::move(samples);
    j["provenance"] = {{"seed", m.provenance.seed},
                       {"config_hash", m.provenance.config_hash},
                       {"config", m.provenance.config},
                       {"tombstones", m.provenance.tombstones}};
    return j;
}

DatasetManifest manifest_from_json(const json& j) {
    if (!j.is_object()) schema_error("top level must be an object");
    DatasetManifest m;
    const auto& version = require(j, "version", "manifest");
    if (!version.is_number_integer() || version.get<int>() != kManifestVersion)
        schema_error("schema version " + version.dump() + " is not supported (expected " +
                     std::to_string(kManifestVersion) + ")");
    m.task = task_from_json(require(j, "task", "manifest"));
    const auto& samples = require(j, "samples", "manifest");
    if (!samples.is_array()) schema_error("samples must be an array");
    for (std::size_t i = 0; i < samples.size(); ++i) m.samples.push_back(record_from_json(samples[i], i));
    if (j.contains("provenance")) {
        const auto& p = j["provenance"];
        if (!p.is_object()) schema_error("provenance must be an object");
        if (p.contains("seed")) {
            if (!p["seed"].is_number_unsigned()) schema_error("provenance.seed must be unsigned");
            m.provenance.seed = p["seed"].get<std::uint64_t>();
        }
        m.provenance.config_hash = p.value("config_hash", "");
        if (p.contains("config")) m.provenance.config = p["config"];
        if (p.contains("tombstones")) m.provenance.tombstones = p["tombstones"];
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kTopKeys.contains(it.key())) m.extra[it.key()] = it.value();
    return m;
}

std::string serialize_manifest(const DatasetManifest& manifest) {
    return to_json(manifest).dump(2) + "\n";
}

void validate_manifest(const DatasetManifest& manifest, const fs::path& root) {
    std::map<std::string, int> counts;
    for (const auto& s : manifest.samples) ++counts[s.id];
    std::string dups;
    for (const auto& [id, n] : counts) {
        if (n > 1) dups += (dups.empty() ? "" : ", ") + id;
    }
    if (!dups.empty()) throw Error(ErrorKind::validation, "duplicate sample ids: " + dups);

    for (std::size_t i = 0; i < manifest.task.support.size(); ++i) {
        const auto& p = manifest.task.support[i];
        check_dimensions(root, p.image, p.mask, "support entry " + std::to_string(i));
    }
    for (std::size_t i = 0; i < manifest.task.base_pool.size(); ++i) {
        const auto& p = manifest.task.base_pool[i];
        check_dimensions(root, p.image, p.mask, "base-pool entry " + std::to_string(i));
    }
    for (const auto& s : manifest.samples) {
        const std::string who = "record \"" + s.id + "\"";
        if (s.origin == SampleOrigin::generated) {
            if (!s.combination_key)
                throw Error(ErrorKind::validation, who + " is generated but has no combination_key");
            if (s.region_count == 0)
                throw Error(ErrorKind::validation, who + " is generated but has no region_count");
            try {
                validate_key(*s.combination_key, s.region_count,
                             std::numeric_limits<std::size_t>::max());
            } catch (const Error& e) {
                throw Error(ErrorKind::validation, who + ": " + e.what());
            }
        }
        check_dimensions(root, s.image_path, s.mask_path, who);
    }
}

DatasetManifest load_manifest(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, "manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    auto m = manifest_from_json(j);
    validate_manifest(m, path.parent_path());
    return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    write_file_atomic(path, serialize_manifest(manifest));
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hex64(h);
}

std::vector<TrainingPair> extract_training_pairs(const RasterImage& image,
                                                 std::span<const Rect> boxes) {
    std::vector<TrainingPair> out;
    out.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const Rect& box = boxes[i];
        if (!inside(box, image.width(), image.height()))
            throw Error(ErrorKind::geometry, "box " + std::to_string(i) + " " + to_string(box) +
                                                 " is outside the " + std::to_string(image.width()) +
                                                 "x" + std::to_string(image.height()) + " image");
        RasterImage masked = image;
        paste(masked, RasterImage(box.w, box.h), box.x, box.y);
        out.push_back({std::move(masked), crop(image, box),
                       filled_rect_mask(image.width(), image.height(), box), image});
    }
    return out;
}

std::vector<DetectionBox> parse_boxes(std::string_view text) {
    std::vector<DetectionBox> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        DetectionBox b;
        std::string trailing;
        if (!(ls >> b.image_id >> b.box.x >> b.box.y >> b.box.w >> b.box.h) || (ls >> trailing))
            throw Error(ErrorKind::validation, "boxes line " + std::to_string(lineno) +
                                                   ": expected \"image_id x y w h\"");
        out.push_back(std::move(b));
    }
    return out;
}

std::string sample_id(const GeneratedSample& s) {
    if (s.origin == SampleOrigin::copy_paste) return s.base_id + "_cp_s" + hex64(s.seed);
    std::string id = s.base_id + "_s" + hex64(s.seed) + "_0b";
    const std::string key = to_string(s.sample.key);  // 0b<bits>:<choices>
    const auto colon = key.find(':');
    id += key.substr(2, colon - 2);
    id += '_';
    for (char c : key.substr(colon + 1)) id += (c == ',' ? '-' : c);
    return id;
}

SampleRecord write_sample(const GeneratedSample& s, const fs::path& root) {
    if (s.sample.mask.width() != s.sample.image.width() ||
        s.sample.mask.height() != s.sample.image.height())
        throw Error(ErrorKind::geometry, "sample mask does not match its image");
    SampleRecord r;
    r.id = sample_id(s);
    r.image_path = "images/" + r.id + ".png";
    r.mask_path = "masks/" + r.id + ".png";
    r.origin = s.origin;
    if (s.origin == SampleOrigin::generated) {
        r.combination_key = s.sample.key;
        r.region_count = s.region_count;
    }
    r.base_id = s.base_id;
    r.scores = s.sample.region_scores;
    write_png(s.sample.image, root / r.image_path);
    write_png(s.sample.mask, root / r.mask_path);
    return r;
}

DatasetManifest export_augmented(const FewShotTask& task, const fs::path& source_root,
                                 std::span<const GeneratedSample> samples,
                                 const Provenance& provenance, const fs::path& out_dir) {
    fs::create_directories(out_dir / "images");
    fs::create_directories(out_dir / "masks");
    fs::create_directories(out_dir / "refs");

    DatasetManifest m;
    m.task.class_name = task.class_name;
    m.provenance = provenance;

    auto copy_pair = [&](const ImageMaskPair& src, const std::string& image_rel,
                         const std::string& mask_rel, const std::string& who) {
        const RasterImage img = read_png_image(source_root / src.image);
        const BitMask msk = read_png_mask(source_root / src.mask);
        if (img.width() != msk.width() || img.height() != msk.height())
            throw Error(ErrorKind::geometry, who + " image and mask dimensions differ");
        write_png(img, out_dir / image_rel);
        write_png(msk, out_dir / mask_rel);
        return ImageMaskPair{image_rel, mask_rel};
    };

    for (std::size_t i = 0; i < task.support.size(); ++i) {
        const std::string id = indexed("support", i);
        auto pair = copy_pair(task.support[i], "refs/" + id + ".png", "masks/" + id + ".png",
                              "support entry " + std::to_string(i));
        SampleRecord rec;
        rec.id = id;
        rec.image_path = pair.image;
        rec.mask_path = pair.mask;
        rec.origin = SampleOrigin::annotated;
        m.samples.push_back(std::move(rec));
        m.task.support.push_back(std::move(pair));
    }
    for (std::size_t i = 0; i < task.base_pool.size(); ++i) {
        const std::string id = indexed("base", i);
        m.task.base_pool.push_back(copy_pair(task.base_pool[i], "images/" + id + ".png",
                                             "masks/" + id + "_placement.png",
                                             "base-pool entry " + std::to_string(i)));
    }
    for (const auto& s : samples) m.samples.push_back(write_sample(s, out_dir));

    validate_manifest(m, out_dir);
    save_manifest(m, out_dir / "task.json");
    return m;
}

} // namespace augment
