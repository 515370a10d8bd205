// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include <png.h>

#include "augment/codec.hpp"
#include "augment/error.hpp"
#include "augment/imaging.hpp"
#include "oracles.hpp"

using namespace augment;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::io;
}

} // namespace

TEST_CASE("images reject non-positive sizes and short buffers") {
    CHECK(kind_of([] { RasterImage(0, 4); }) == ErrorKind::geometry);
    CHECK(kind_of([] { BitMask(3, -1); }) == ErrorKind::geometry);
    CHECK(kind_of([] { RasterImage(2, 2, std::vector<std::uint8_t>(11)); }) == ErrorKind::geometry);
}

TEST_CASE("crop returns the exact sub-grid") {
    const RasterImage img = oracle::gradient_image(100, 100);
    const Rect r{10, 20, 30, 40};
    const RasterImage c = crop(img, r);
    REQUIRE(c.width() == 30);
    REQUIRE(c.height() == 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 30; ++x) CHECK(c.at(x, y) == img.at(x + 10, y + 20));
}

TEST_CASE("crop outside the image is a geometry error naming the rect") {
    const RasterImage img(100, 100);
    try {
        crop(img, Rect{90, 90, 20, 20});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::geometry);
        CHECK(std::string(e.what()).find("90") != std::string::npos);
    }
}

TEST_CASE("coverage counts set bits over area") {
    BitMask m(10, 10);
    for (int i = 0; i < 22; ++i) m.set(i % 10, i / 10);
    CHECK(popcount(m) == 22);
    CHECK(mask_coverage(m) == doctest::Approx(0.22).epsilon(1e-12));
    CHECK(mask_coverage(BitMask(7, 3)) == 0.0);
}

TEST_CASE("dilation matches the neighbourhood-scan oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 5 + static_cast<int>(rng() % 30), h = 5 + static_cast<int>(rng() % 30);
        const BitMask m = oracle::random_mask(rng, w, h, 0.03);
        for (int r : {0, 1, 2, 5}) CHECK(dilate(m, r) == oracle::dilate(m, r));
    }
    CHECK(kind_of([] { dilate(BitMask(3, 3), -1); }) == ErrorKind::geometry);
}

TEST_CASE("set operations and subset test") {
    std::mt19937_64 rng(3);
    const BitMask a = oracle::random_mask(rng, 16, 16, 0.4), b = oracle::random_mask(rng, 16, 16, 0.4);
    const BitMask u = mask_union(a, b), i = mask_intersection(a, b);
    const auto c = oracle::iou_counts(a, b);
    CHECK(popcount(u) == c.union_);
    CHECK(popcount(i) == c.intersection);
    CHECK(is_subset(i, a));
    CHECK(is_subset(a, u));
    CHECK(is_subset(a, dilate(a, 1)));
}

TEST_CASE("bounding box of set bits") {
    BitMask m(20, 10);
    CHECK_FALSE(bounding_box(m).has_value());
    m.set(3, 4);
    m.set(7, 2);
    CHECK(bounding_box(m) == Rect{3, 2, 5, 3});
}

TEST_CASE("paste then crop is the identity on the patch") {
    std::mt19937_64 rng(5);
    RasterImage img = oracle::random_image(rng, 40, 30);
    const RasterImage patch = oracle::random_image(rng, 7, 9);
    paste(img, patch, 12, 3);
    CHECK(crop(img, Rect{12, 3, 7, 9}) == patch);
}

TEST_CASE("nearest resize at scale 1 is the identity") {
    std::mt19937_64 rng(9);
    const RasterImage img = oracle::random_image(rng, 13, 17);
    CHECK(resize_nearest(img, 13, 17) == img);
    const RasterImage up = resize_nearest(img, 26, 34);
    for (int y = 0; y < 34; ++y)
        for (int x = 0; x < 26; ++x) CHECK(up.at(x, y) == img.at(x / 2, y / 2));
}

TEST_CASE("run seeds are deterministic and index-sensitive") {
    const RunSeed s{42};
    CHECK(s.derive(1, 2, 3) == RunSeed{42}.derive(1, 2, 3));
    CHECK(s.derive(1, 2, 3) != s.derive(1, 3, 2));
    CHECK(s.derive(0, 0, 0) != RunSeed{43}.derive(0, 0, 0));
    CHECK(s.child(0).root != s.child(1).root);
}

TEST_CASE("PNG round-trips images and masks") {
    std::mt19937_64 rng(21);
    const RasterImage img = oracle::random_image(rng, 31, 17);
    CHECK(decode_png_image(encode_png(img)) == img);
    const BitMask m = oracle::random_mask(rng, 31, 17, 0.5);
    CHECK(decode_png_mask(encode_png(m)) == m);

    const auto dir = oracle::temp_dir("png");
    write_png(img, dir / "a.png");
    CHECK(read_png_image(dir / "a.png") == img);
    CHECK(png_extent(dir / "a.png") == Extent{31, 17});
}

TEST_CASE("mask reading treats any nonzero gray value as set") {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = 4;
    image.height = 1;
    image.format = PNG_FORMAT_GRAY;
    const std::uint8_t px[4] = {0, 1, 128, 255};
    png_alloc_size_t size = 0;
    REQUIRE(png_image_write_to_memory(&image, nullptr, &size, 0, px, 0, nullptr));
    std::vector<std::uint8_t> buf(size);
    REQUIRE(png_image_write_to_memory(&image, buf.data(), &size, 0, px, 0, nullptr));
    const BitMask m = decode_png_mask(buf);
    CHECK_FALSE(m.at(0, 0));
    CHECK(m.at(1, 0));
    CHECK(m.at(2, 0));
    CHECK(m.at(3, 0));
}

TEST_CASE("corrupt PNG data and bad base64 are rejected") {
    const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(decode_png_image(junk), Error);
    CHECK(kind_of([] { base64_decode("***"); }) == ErrorKind::protocol);
    const std::vector<std::uint8_t> bytes = {0, 1, 2, 250, 255};
    CHECK(base64_encode(bytes) == "AAEC+v8=");
    CHECK(base64_decode("AAEC+v8=") == bytes);
}
