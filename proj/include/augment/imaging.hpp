// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace augment {

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const noexcept { return x + w; }   // exclusive
    int bottom() const noexcept { return y + h; }  // exclusive
    long long area() const noexcept { return static_cast<long long>(w) * h; }
    bool contains(int px, int py) const noexcept {
        return px >= x && py >= y && px < right() && py < bottom();
    }
    bool overlaps(const Rect& o) const noexcept {
        return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
    }
    bool operator==(const Rect&) const = default;
};

std::string to_string(const Rect& r);

using Pixel = std::array<std::uint8_t, 3>;

// 8-bit RGB, row-major, interleaved.
class RasterImage {
  public:
    RasterImage(int width, int height, Pixel fill = {0, 0, 0});
    RasterImage(int width, int height, std::vector<std::uint8_t> rgb);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Rect bounds() const noexcept { return {0, 0, width_, height_}; }

    Pixel at(int x, int y) const noexcept {
        const auto* p = &data_[offset(x, y)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Pixel px) noexcept {
        auto* p = &data_[offset(x, y)];
        p[0] = px[0];
        p[1] = px[1];
        p[2] = px[2];
    }

    std::span<const std::uint8_t> bytes() const noexcept { return data_; }
    std::span<std::uint8_t> bytes() noexcept { return data_; }

    bool operator==(const RasterImage&) const = default;

  private:
    std::size_t offset(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

// Binary mask; each pixel is 0 (unmasked) or 1 (masked). Stored one byte per
// pixel so that rows can be addressed without bit twiddling.
class BitMask {
  public:
    BitMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Rect bounds() const noexcept { return {0, 0, width_, height_}; }

    bool at(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v = true) noexcept {
        bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    bool operator==(const BitMask&) const = default;

  private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

// Reproducible randomness root. Derived seeds depend only on the root and the
// (region, variation, attempt) indices.
struct RunSeed {
    std::uint64_t root = 0;

    std::uint64_t derive(std::uint64_t region, std::uint64_t variation,
                         std::uint64_t attempt) const noexcept;
    // Independent child stream, e.g. one per base image.
    RunSeed child(std::uint64_t index) const noexcept;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

bool inside(const Rect& r, int width, int height) noexcept;

// Throws Error(geometry) if r is not inside an image of the given size.
void require_inside(const Rect& r, int width, int height);

RasterImage crop(const RasterImage& image, const Rect& rect);
BitMask crop(const BitMask& mask, const Rect& rect);

// Writes `patch` into `image` at rect.x, rect.y; patch dimensions define the rect.
void paste(RasterImage& image, const RasterImage& patch, int x, int y);
void paste(BitMask& mask, const BitMask& patch, int x, int y);

std::size_t popcount(const BitMask& mask) noexcept;
double mask_coverage(const BitMask& mask) noexcept;

// Chebyshev dilation: output(p) = 1 iff some input 1-bit q has max(|dx|,|dy|) <= radius.
BitMask dilate(const BitMask& mask, int radius);

BitMask mask_union(const BitMask& a, const BitMask& b);
BitMask mask_intersection(const BitMask& a, const BitMask& b);
bool is_subset(const BitMask& inner, const BitMask& outer);

// Bounding box of the set bits; nullopt for an empty mask.
std::optional<Rect> bounding_box(const BitMask& mask) noexcept;

BitMask filled_rect_mask(int width, int height, const Rect& rect);

// Nearest-neighbour resampling.
RasterImage resize_nearest(const RasterImage& image, int width, int height);
BitMask resize_nearest(const BitMask& mask, int width, int height);

// Integer Rec.601 luma in [0, 255].
int luminance(Pixel px) noexcept;

} // namespace augment
