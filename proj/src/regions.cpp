// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/regions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <tuple>

#include "augment/error.hpp"

namespace augment {

namespace {

struct Component {
    Rect bbox;
    std::size_t first_pixel = 0;  // raster index of the first pixel found
    std::vector<std::size_t> pixels;
};

std::vector<Component> label_components(const BitMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<Component> comps;
    std::deque<std::size_t> queue;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t start = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.at(x0, y0) || seen[start]) continue;
            Component c;
            c.first_pixel = start;
            int minx = x0, maxx = x0, miny = y0, maxy = y0;
            seen[start] = 1;
            queue.push_back(start);
            while (!queue.empty()) {
                const std::size_t p = queue.front();
                queue.pop_front();
                c.pixels.push_back(p);
                const int px = static_cast<int>(p % w);
                const int py = static_cast<int>(p / w);
                minx = std::min(minx, px);
                maxx = std::max(maxx, px);
                miny = std::min(miny, py);
                maxy = std::max(maxy, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                        if (seen[q] || !mask.at(nx, ny)) continue;
                        seen[q] = 1;
                        queue.push_back(q);
                    }
                }
            }
            c.bbox = {minx, miny, maxx - minx + 1, maxy - miny + 1};
            comps.push_back(std::move(c));
        }
    }
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        return std::tie(a.bbox.y, a.bbox.x, a.first_pixel) <
               std::tie(b.bbox.y, b.bbox.x, b.first_pixel);
    });
    return comps;
}

// bbox grown by `margin` on every side, clamped to the image.
Rect grow(const Rect& bbox, int margin, int width, int height) {
    const int x0 = std::max(0, bbox.x - margin);
    const int y0 = std::max(0, bbox.y - margin);
    const int x1 = std::min(width, bbox.right() + margin);
    const int y1 = std::min(height, bbox.bottom() + margin);
    return {x0, y0, x1 - x0, y1 - y0};
}

double coverage_of(std::size_t pixels, const Rect& r) {
    return static_cast<double>(pixels) / static_cast<double>(r.area());
}

// Margin whose coverage is in the band and closest to its midpoint. When the
// band cannot be reached: margin 0 for components already too sparse, else
// the margin of the full clamped window.
int choose_margin(const Component& c, const CoverageBand& band, int width, int height) {
    const int max_margin = std::max(width, height);
    const Rect full = grow(c.bbox, max_margin, width, height);
    int best = -1;
    double best_dist = 0.0;
    for (int m = 0; m <= max_margin; ++m) {
        const Rect r = grow(c.bbox, m, width, height);
        const double cov = coverage_of(c.pixels.size(), r);
        if (band.contains(cov)) {
            const double dist = std::abs(cov - band.midpoint());
            if (best < 0 || dist < best_dist) {
                best = m;
                best_dist = dist;
            }
        }
        if (cov < band.low || r == full) break;
    }
    if (best >= 0) return best;
    if (coverage_of(c.pixels.size(), c.bbox) < band.low) return 0;
    return max_margin;
}

void validate_band(const CoverageBand& band) {
    if (!(band.low > 0.0 && band.low < band.high && band.high <= 1.0)) {
        throw Error(ErrorKind::config, "coverage band must satisfy 0 < low < high <= 1");
    }
}

} // namespace

std::vector<BitMask> connected_components(const BitMask& mask) {
    std::vector<BitMask> out;
    for (const auto& c : label_components(mask)) {
        BitMask m(mask.width(), mask.height());
        for (const auto p : c.pixels)
            m.set(static_cast<int>(p % mask.width()), static_cast<int>(p / mask.width()));
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<RegionSpec> extract_regions(const RasterImage& base, const BitMask& placement_mask,
                                        CoverageBand band) {
    if (base.width() != placement_mask.width() || base.height() != placement_mask.height()) {
        throw Error(ErrorKind::geometry,
                    "placement mask is " + std::to_string(placement_mask.width()) + "x" +
                        std::to_string(placement_mask.height()) + " but base image is " +
                        std::to_string(base.width()) + "x" + std::to_string(base.height()));
    }
    return extract_regions(placement_mask, band);
}

std::vector<RegionSpec> extract_regions(const BitMask& placement_mask, CoverageBand band) {
    validate_band(band);
    const int w = placement_mask.width();
    const int h = placement_mask.height();
    const auto comps = label_components(placement_mask);
    const std::size_t n = comps.size();

    std::vector<int> margins(n);
    for (std::size_t i = 0; i < n; ++i) margins[i] = choose_margin(comps[i], band, w, h);

    // Shrink overlapping windows one margin step at a time until disjoint or
    // back at their bboxes.
    std::vector<bool> overlapping(n, false);
    for (;;) {
        std::fill(overlapping.begin(), overlapping.end(), false);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Rect ri = grow(comps[i].bbox, margins[i], w, h);
            for (std::size_t j = i + 1; j < n; ++j) {
                if (ri.overlaps(grow(comps[j].bbox, margins[j], w, h))) {
                    overlapping[i] = overlapping[j] = true;
                    any = true;
                }
            }
        }
        if (!any) break;
        bool shrunk = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (overlapping[i] && margins[i] > 0) {
                --margins[i];
                shrunk = true;
            }
        }
        if (!shrunk) break;  // bboxes themselves overlap
    }

    std::vector<RegionSpec> regions;
    regions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = comps[i];
        RegionSpec r{.index = i,
                     .rect = grow(c.bbox, margins[i], w, h),
                     .region_mask = BitMask(1, 1),
                     .component_bbox = c.bbox};
        BitMask local(r.rect.w, r.rect.h);
        for (const auto p : c.pixels) {
            local.set(static_cast<int>(p % w) - r.rect.x, static_cast<int>(p / w) - r.rect.y);
        }
        r.region_mask = std::move(local);
        r.coverage = mask_coverage(r.region_mask);
        r.feasible = band.contains(r.coverage) && c.pixels.size() >= kMinComponentPixels &&
                     !overlapping[i];
        regions.push_back(std::move(r));
    }
    return regions;
}

} // namespace augment
