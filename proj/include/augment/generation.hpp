// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "augment/backend.hpp"
#include "augment/imaging.hpp"
#include "augment/regions.hpp"

namespace augment {

struct GenerationConfig {
    int variations_per_region = 4;      // L
    double similarity_threshold = 0.75;
    int max_attempts = 5;
    int dilation_radius = 5;
    double min_refined_fraction = 0.2;
    int workers = 1;  // variations generated concurrently per region

    // Throws Error(config) on L < 1, max_attempts < 1, negative radius,
    // threshold outside [-1, 1] or fraction outside [0, 1].
    void validate() const;
};

enum VariationFlag : unsigned {
    kNoFlags = 0,
    kBelowThreshold = 1u << 0,
    kMaskFallback = 1u << 1,
};

struct Variation {
    std::size_t region_index = 0;
    std::size_t variation_index = 0;
    RasterImage image;     // full crop, rect-sized
    BitMask refined_mask;  // crop-local
    double similarity = 0.0;
    std::size_t reference_index = 0;       // starting reference, l mod K
    std::size_t kept_reference_index = 0;  // reference of the kept attempt
    int attempts_used = 0;
    unsigned flags = kNoFlags;

    bool has(VariationFlag f) const noexcept { return (flags & f) != 0; }
};

// Called after each finished variation with (done, total) for the region.
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// The candidate's object area: the crop to the bbox of the region mask.
RasterImage object_area(const RasterImage& candidate, const RegionSpec& region);

// Generates L variations for one region. Variation l starts from reference
// l mod K; attempt a uses reference (l + a) mod K and seed
// seed.derive(region.index, l, a). The first candidate with similarity >= the
// threshold is kept; otherwise the best-scoring one, flagged below_threshold.
std::vector<Variation> generate_region_variations(const RegionSpec& region,
                                                  const RasterImage& base,
                                                  std::span<const RasterImage> references,
                                                  const GenerationConfig& cfg,
                                                  const Backends& backends, const RunSeed& seed,
                                                  const ProgressFn& progress = {});

// segment(candidate, bbox of region mask) intersected with the dilated region
// mask; falls back to the region mask when the result is smaller than
// min_refined_fraction of it.
std::pair<BitMask, unsigned> refine_mask(const RasterImage& candidate, const RegionSpec& region,
                                         const GenerationConfig& cfg, SegmentBackend& segmenter);

// base with candidate pixels selected wherever the region mask is set.
RasterImage composite_region(const RasterImage& base, const RegionSpec& region,
                             const RasterImage& candidate);
// In-place variant.
void composite_region_into(RasterImage& image, const RegionSpec& region,
                           const RasterImage& candidate);

} // namespace augment
