// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "augment/dataset.hpp"
#include "augment/imaging.hpp"

namespace augment {

// Binary IoU; 1.0 when both masks are empty. Throws Error(geometry) if the
// dimensions differ.
double iou(const BitMask& pred, const BitMask& gt);

struct ImageIou {
    std::string id;
    std::size_t intersection = 0;
    std::size_t union_ = 0;
    double iou = 0.0;
    bool both_empty = false;
    bool missing_prediction = false;
};

struct IouReport {
    std::string class_name;
    std::vector<ImageIou> per_image;
    double aggregate_iou = 0.0;  // total intersection / total union
    double mean_iou = 0.0;       // mean of per-image values
    std::vector<std::string> missing;
};

using Prediction = std::pair<std::string, BitMask>;

// Every manifest record is ground truth. Predictions for ids not in the
// manifest are an Error(validation); records without a prediction are scored
// against an empty mask and listed in `missing`.
IouReport evaluate(std::span<const Prediction> predictions, const DatasetManifest& manifest,
                   const std::filesystem::path& root);

nlohmann::json to_json(const IouReport& report);

// Method x class table with IoU as percentages, two decimals.
std::string format_iou_table(std::span<const std::pair<std::string, IouReport>> rows);

} // namespace augment
