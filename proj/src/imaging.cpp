// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/imaging.hpp"

#include <algorithm>
#include <utility>

#include "augment/error.hpp"

namespace augment {

namespace {

void require_positive(int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorKind::geometry, "image dimensions must be positive, got " +
                                             std::to_string(width) + "x" +
                                             std::to_string(height));
    }
}

void require_same_size(const BitMask& a, const BitMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorKind::geometry, "mask dimensions differ");
    }
}

} // namespace

std::string to_string(const Rect& r) {
    return "Rect(" + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) +
           "," + std::to_string(r.h) + ")";
}

RasterImage::RasterImage(int width, int height, Pixel fill) : width_(width), height_(height) {
    require_positive(width, height);
    data_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill[0];
        data_[i + 1] = fill[1];
        data_[i + 2] = fill[2];
    }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
    require_positive(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
        throw Error(ErrorKind::geometry, "pixel buffer size does not match " +
                                             std::to_string(width) + "x" +
                                             std::to_string(height) + "x3");
    }
}

BitMask::BitMask(int width, int height, bool fill) : width_(width), height_(height) {
    require_positive(width, height);
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t RunSeed::derive(std::uint64_t region, std::uint64_t variation,
                              std::uint64_t attempt) const noexcept {
    std::uint64_t h = mix64(root);
    h = mix64(h ^ region);
    h = mix64(h ^ variation);
    return mix64(h ^ attempt);
}

RunSeed RunSeed::child(std::uint64_t index) const noexcept {
    return RunSeed{mix64(mix64(root ^ 0x5eedc0de5eedc0deULL) ^ index)};
}

bool inside(const Rect& r, int width, int height) noexcept {
    return r.w >= 1 && r.h >= 1 && r.x >= 0 && r.y >= 0 &&
           static_cast<long long>(r.x) + r.w <= width && static_cast<long long>(r.y) + r.h <= height;
}

void require_inside(const Rect& r, int width, int height) {
    if (!inside(r, width, height)) {
        throw Error(ErrorKind::geometry, to_string(r) + " is outside " + std::to_string(width) +
                                             "x" + std::to_string(height) + " bounds");
    }
}

RasterImage crop(const RasterImage& image, const Rect& rect) {
    require_inside(rect, image.width(), image.height());
    std::vector<std::uint8_t> out(static_cast<std::size_t>(rect.w) * rect.h * 3);
    const auto src = image.bytes();
    const std::size_t row = static_cast<std::size_t>(rect.w) * 3;
    for (int j = 0; j < rect.h; ++j) {
        const std::size_t from = (static_cast<std::size_t>(rect.y + j) * image.width() + rect.x) * 3;
        std::copy_n(src.begin() + from, row, out.begin() + j * row);
    }
    return RasterImage(rect.w, rect.h, std::move(out));
}

BitMask crop(const BitMask& mask, const Rect& rect) {
    require_inside(rect, mask.width(), mask.height());
    BitMask out(rect.w, rect.h);
    for (int j = 0; j < rect.h; ++j)
        for (int i = 0; i < rect.w; ++i)
            out.set(i, j, mask.at(rect.x + i, rect.y + j));
    return out;
}

void paste(RasterImage& image, const RasterImage& patch, int x, int y) {
    const Rect r{x, y, patch.width(), patch.height()};
    require_inside(r, image.width(), image.height());
    auto dst = image.bytes();
    const auto src = patch.bytes();
    const std::size_t row = static_cast<std::size_t>(r.w) * 3;
    for (int j = 0; j < r.h; ++j) {
        const std::size_t to = (static_cast<std::size_t>(y + j) * image.width() + x) * 3;
        std::copy_n(src.begin() + j * row, row, dst.begin() + to);
    }
}

void paste(BitMask& mask, const BitMask& patch, int x, int y) {
    require_inside({x, y, patch.width(), patch.height()}, mask.width(), mask.height());
    for (int j = 0; j < patch.height(); ++j)
        for (int i = 0; i < patch.width(); ++i)
            mask.set(x + i, y + j, patch.at(i, j));
}

std::size_t popcount(const BitMask& mask) noexcept {
    return static_cast<std::size_t>(std::count(mask.bits().begin(), mask.bits().end(), 1));
}

double mask_coverage(const BitMask& mask) noexcept {
    return static_cast<double>(popcount(mask)) /
           (static_cast<double>(mask.width()) * mask.height());
}

BitMask dilate(const BitMask& mask, int radius) {
    if (radius < 0) throw Error(ErrorKind::geometry, "dilation radius must be >= 0");
    if (radius == 0) return mask;
    const int w = mask.width();
    const int h = mask.height();
    // Separable: a square structuring element is a horizontal pass followed by
    // a vertical one.
    BitMask horizontal(w, h);
    for (int y = 0; y < h; ++y) {
        int last = -1;  // last set column seen so far
        std::vector<int> next(w + 1, -1);
        for (int x = w - 1; x >= 0; --x) next[x] = mask.at(x, y) ? x : next[x + 1];
        for (int x = 0; x < w; ++x) {
            if (mask.at(x, y)) last = x;
            const bool left = last >= 0 && x - last <= radius;
            const bool right = next[x] >= 0 && next[x] - x <= radius;
            horizontal.set(x, y, left || right);
        }
    }
    BitMask out(w, h);
    for (int x = 0; x < w; ++x) {
        int last = -1;
        std::vector<int> next(h + 1, -1);
        for (int y = h - 1; y >= 0; --y) next[y] = horizontal.at(x, y) ? y : next[y + 1];
        for (int y = 0; y < h; ++y) {
            if (horizontal.at(x, y)) last = y;
            const bool up = last >= 0 && y - last <= radius;
            const bool down = next[y] >= 0 && next[y] - y <= radius;
            out.set(x, y, up || down);
        }
    }
    return out;
}

BitMask mask_union(const BitMask& a, const BitMask& b) {
    require_same_size(a, b);
    BitMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(x, y, a.at(x, y) || b.at(x, y));
    return out;
}

BitMask mask_intersection(const BitMask& a, const BitMask& b) {
    require_same_size(a, b);
    BitMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(x, y, a.at(x, y) && b.at(x, y));
    return out;
}

bool is_subset(const BitMask& inner, const BitMask& outer) {
    require_same_size(inner, outer);
    const auto a = inner.bits();
    const auto b = outer.bits();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i]) return false;
    return true;
}

std::optional<Rect> bounding_box(const BitMask& mask) noexcept {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return std::nullopt;
    return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BitMask filled_rect_mask(int width, int height, const Rect& rect) {
    require_inside(rect, width, height);
    BitMask out(width, height);
    for (int y = rect.y; y < rect.bottom(); ++y)
        for (int x = rect.x; x < rect.right(); ++x) out.set(x, y);
    return out;
}

namespace {

// Source coordinate for destination index i when scaling n -> m.
int nearest_source(int i, int dst, int src) noexcept {
    return static_cast<int>((static_cast<long long>(i) * src) / dst);
}

} // namespace

RasterImage resize_nearest(const RasterImage& image, int width, int height) {
    if (width == image.width() && height == image.height()) return image;
    RasterImage out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = nearest_source(y, height, image.height());
        for (int x = 0; x < width; ++x)
            out.set(x, y, image.at(nearest_source(x, width, image.width()), sy));
    }
    return out;
}

BitMask resize_nearest(const BitMask& mask, int width, int height) {
    if (width == mask.width() && height == mask.height()) return mask;
    BitMask out(width, height);
    for (int y = 0; y < height; ++y) {
        const int sy = nearest_source(y, height, mask.height());
        for (int x = 0; x < width; ++x)
            out.set(x, y, mask.at(nearest_source(x, width, mask.width()), sy));
    }
    return out;
}

int luminance(Pixel px) noexcept {
    return (299 * px[0] + 587 * px[1] + 114 * px[2] + 500) / 1000;
}

} // namespace augment
