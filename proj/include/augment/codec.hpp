// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augment/imaging.hpp"

namespace augment {

// PNG conventions: images are 8-bit RGB; masks are 8-bit gray with 0 for
// unmasked and 255 for masked. When reading a mask, any nonzero byte becomes
// a set bit (a warning is logged if values other than 0/255 were present).

std::vector<std::uint8_t> encode_png(const RasterImage& image);
std::vector<std::uint8_t> encode_png(const BitMask& mask);
RasterImage decode_png_image(std::span<const std::uint8_t> png);
BitMask decode_png_mask(std::span<const std::uint8_t> png);

RasterImage read_png_image(const std::filesystem::path& path);
BitMask read_png_mask(const std::filesystem::path& path);
void write_png(const RasterImage& image, const std::filesystem::path& path);
void write_png(const BitMask& mask, const std::filesystem::path& path);

struct Extent {
    int width = 0;
    int height = 0;
    bool operator==(const Extent&) const = default;
};

// Reads only the PNG header.
Extent png_extent(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Writes bytes to path via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace augment
