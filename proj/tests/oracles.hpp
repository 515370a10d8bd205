// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations and fixtures shared by the tests.
// Nothing here calls the library code it is used to check.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "augment/dataset.hpp"
#include "augment/imaging.hpp"

namespace oracle {

// Number of non-zero digit vectors in {0..L}^N, by listing them.
std::uint64_t count_selections(int regions, int variations);

// Every selection as "bits|c0,c1,..." with bit n = region n, listed by
// walking {0..L}^N (digit 0 = excluded, d = variation d-1).
std::set<std::string> selection_strings(int regions, int variations);

// Chebyshev dilation by scanning every pixel's full neighbourhood.
augment::BitMask dilate(const augment::BitMask& mask, int radius);

// 8-connected components by union-find; each as the sorted list of pixel
// indices (y * w + x).
std::vector<std::vector<int>> components(const augment::BitMask& mask);

struct Counts {
    std::size_t intersection = 0;
    std::size_t union_ = 0;
};
Counts iou_counts(const augment::BitMask& a, const augment::BitMask& b);

std::size_t count_set(const augment::BitMask& m);

augment::BitMask disk(int width, int height, int cx, int cy, int radius);
augment::BitMask square(int width, int height, int x, int y, int side);
augment::BitMask random_mask(std::mt19937_64& rng, int width, int height, double density);
augment::RasterImage random_image(std::mt19937_64& rng, int width, int height);
// Dim (channels < 128) smooth image, so bright objects stand out.
augment::RasterImage gradient_image(int width, int height, int phase = 0);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

// Writes a small few-shot task under root: `support` support pairs (a
// bright rectangle on a dark background) and one base image per
// entry of `placements`, each with that placement mask. Paths in the task are
// relative to root.
augment::FewShotTask write_task(const std::filesystem::path& root, int support,
                                const std::vector<augment::BitMask>& placements,
                                int width = 256, int height = 256);

// Byte-exact comparison of two directory trees.
bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string* why);

} // namespace oracle
