// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "augment/imaging.hpp"

namespace augment {

// Inclusive coverage band a region's placement mask should occupy.
struct CoverageBand {
    double low = 0.15;
    double high = 0.30;

    double midpoint() const noexcept { return 0.5 * (low + high); }
    bool contains(double c) const noexcept { return c >= low && c <= high; }
};

// Components smaller than this are kept but never feasible.
inline constexpr std::size_t kMinComponentPixels = 16;

// One croppable region of a base image.
struct RegionSpec {
    std::size_t index = 0;
    Rect rect;            // crop window in base-image coordinates
    BitMask region_mask;  // this component only, crop-local
    Rect component_bbox;  // base-image coordinates
    double coverage = 0.0;
    bool feasible = false;
};

// 8-connected components of `mask`, each as a full-size mask, ordered by the
// (top, left) corner of their bounding boxes.
std::vector<BitMask> connected_components(const BitMask& mask);

// One region per 8-connected component of the placement mask. Each crop window
// is the component bbox grown by a symmetric margin (clamped to the image)
// chosen so that coverage lands in `band`, as close to its midpoint as the
// pixel grid allows. Overlapping windows are shrunk back toward their bboxes
// until disjoint.
std::vector<RegionSpec> extract_regions(const RasterImage& base, const BitMask& placement_mask,
                                        CoverageBand band = {});

// Same, without needing the image pixels.
std::vector<RegionSpec> extract_regions(const BitMask& placement_mask, CoverageBand band = {});

} // namespace augment
