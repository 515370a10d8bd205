// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/codec.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <png.h>
#include <sodium.h>
#include <spdlog/spdlog.h>

#include "augment/error.hpp"

namespace augment {

namespace {

struct PngImage {
    png_image image{};
    PngImage() { image.version = PNG_IMAGE_VERSION; }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

[[noreturn]] void png_fail(const png_image& img, const std::string& what) {
    throw Error(ErrorKind::io, what + ": " + img.message);
}

std::vector<std::uint8_t> encode(const std::uint8_t* pixels, int width, int height,
                                 png_uint_32 format) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(width);
    png.image.height = static_cast<png_uint_32>(height);
    png.image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, pixels, 0, nullptr))
        png_fail(png.image, "PNG encode");
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, pixels, 0, nullptr))
        png_fail(png.image, "PNG encode");
    out.resize(size);
    return out;
}

// Decodes into 8-bit pixels of `format` (RGB or GRAY).
std::vector<std::uint8_t> decode(PngImage& png, png_uint_32 format, const std::string& what) {
    png.image.format = format;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr))
        png_fail(png.image, what);
    return pixels;
}

BitMask to_mask(const std::vector<std::uint8_t>& gray, int width, int height,
                const std::string& source) {
    BitMask mask(width, height);
    bool nonbinary = false;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto v = gray[static_cast<std::size_t>(y) * width + x];
            if (v != 0 && v != 255) nonbinary = true;
            mask.set(x, y, v != 0);
        }
    }
    if (nonbinary)
        spdlog::warn("mask {} has values other than 0/255; nonzero treated as masked", source);
    return mask;
}

std::vector<std::uint8_t> mask_bytes(const BitMask& mask) {
    std::vector<std::uint8_t> gray(mask.bits().size());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits()[i] ? 255 : 0;
    return gray;
}

} // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    return encode(image.bytes().data(), image.width(), image.height(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const BitMask& mask) {
    const auto gray = mask_bytes(mask);
    return encode(gray.data(), mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

RasterImage decode_png_image(std::span<const std::uint8_t> bytes) {
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
        png_fail(png.image, "PNG decode");
    auto px = decode(png, PNG_FORMAT_RGB, "PNG decode");
    return RasterImage(static_cast<int>(png.image.width), static_cast<int>(png.image.height),
                       std::move(px));
}

BitMask decode_png_mask(std::span<const std::uint8_t> bytes) {
    PngImage png;
    if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
        png_fail(png.image, "PNG decode");
    const auto gray = decode(png, PNG_FORMAT_GRAY, "PNG decode");
    return to_mask(gray, static_cast<int>(png.image.width), static_cast<int>(png.image.height),
                   "<memory>");
}

RasterImage read_png_image(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str()))
        png_fail(png.image, "reading " + path.string());
    auto px = decode(png, PNG_FORMAT_RGB, "reading " + path.string());
    return RasterImage(static_cast<int>(png.image.width), static_cast<int>(png.image.height),
                       std::move(px));
}

BitMask read_png_mask(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str()))
        png_fail(png.image, "reading " + path.string());
    const auto gray = decode(png, PNG_FORMAT_GRAY, "reading " + path.string());
    return to_mask(gray, static_cast<int>(png.image.width), static_cast<int>(png.image.height),
                   path.string());
}

void write_png(const RasterImage& image, const std::filesystem::path& path) {
    const auto bytes = encode_png(image);
    write_file_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

void write_png(const BitMask& mask, const std::filesystem::path& path) {
    const auto bytes = encode_png(mask);
    write_file_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

Extent png_extent(const std::filesystem::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str()))
        png_fail(png.image, "reading " + path.string());
    return {static_cast<int>(png.image.width), static_cast<int>(png.image.height)};
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    const std::size_t len =
        sodium_base64_ENCODED_LEN(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
    std::string out(len, '\0');
    sodium_bin2base64(out.data(), len, bytes.data(), bytes.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(len - 1);  // drop the terminating NUL
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
    std::size_t len = 0;
    const char* end = nullptr;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), " \r\n", &len, &end,
                          sodium_base64_VARIANT_ORIGINAL) != 0 ||
        end != text.data() + text.size()) {
        throw Error(ErrorKind::protocol, "malformed base64 payload");
    }
    out.resize(len);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorKind::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::io, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace augment
