// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "augment/error.hpp"
#include "augment/regions.hpp"
#include "oracles.hpp"

using namespace augment;

namespace {

std::vector<std::vector<int>> as_pixel_lists(const std::vector<BitMask>& comps) {
    std::vector<std::vector<int>> out;
    for (const auto& c : comps) {
        std::vector<int> px;
        for (int y = 0; y < c.height(); ++y)
            for (int x = 0; x < c.width(); ++x)
                if (c.at(x, y)) px.push_back(y * c.width() + x);
        out.push_back(std::move(px));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Best symmetric margin for a square blob of side s centred far from the
// borders: window side s + 2m, coverage s^2 / (s + 2m)^2.
int best_window_side(int s, const CoverageBand& band) {
    int best = -1;
    double best_gap = 1e9;
    for (int m = 0; m < 200; ++m) {
        const double cov = static_cast<double>(s) * s / ((s + 2.0 * m) * (s + 2.0 * m));
        if (!band.contains(cov)) continue;
        const double gap = std::abs(cov - band.midpoint());
        if (gap < best_gap) {
            best_gap = gap;
            best = s + 2 * m;
        }
    }
    return best;
}

} // namespace

TEST_CASE("connected components agree with a union-find oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const BitMask m = oracle::random_mask(rng, 24, 19, 0.05 + 0.01 * (trial % 40));
        CHECK(as_pixel_lists(connected_components(m)) == oracle::components(m));
    }
}

TEST_CASE("diagonal neighbours join one component") {
    BitMask m(5, 5);
    m.set(0, 0);
    m.set(1, 1);
    m.set(2, 2);
    CHECK(connected_components(m).size() == 1);
}

TEST_CASE("empty mask yields no regions") {
    CHECK(extract_regions(BitMask(64, 64)).empty());
}

TEST_CASE("single square blob gets the window closest to the band midpoint") {
    const BitMask m = oracle::square(256, 256, 118, 118, 20);
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 1);
    const auto& r = regions[0];
    CHECK(r.feasible);
    CHECK(r.rect.w == best_window_side(20, CoverageBand{}));
    CHECK(r.rect.area() == 1764);
    CHECK(r.coverage == doctest::Approx(400.0 / 1764.0));
    CHECK(r.component_bbox == Rect{118, 118, 20, 20});
    CHECK(oracle::count_set(r.region_mask) == 400);
}

TEST_CASE("two separated blobs give disjoint feasible windows") {
    BitMask m = oracle::disk(256, 256, 64, 64, 14);
    const BitMask b = oracle::disk(256, 256, 190, 180, 10);
    m = mask_union(m, b);
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].index == 0);
    CHECK(regions[1].index == 1);
    CHECK_FALSE(regions[0].rect.overlaps(regions[1].rect));
    for (const auto& r : regions) {
        CHECK(r.feasible);
        CHECK(CoverageBand{}.contains(r.coverage));
        CHECK(r.coverage == doctest::Approx(static_cast<double>(popcount(r.region_mask)) / r.rect.area()));
    }
    // Regions are ordered top-to-bottom.
    CHECK(regions[0].component_bbox.y < regions[1].component_bbox.y);
}

TEST_CASE("region masks reassemble the placement mask") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        BitMask m(128, 128);
        for (int k = 0; k < 4; ++k)
            m = mask_union(m, oracle::disk(128, 128, static_cast<int>(rng() % 128),
                                           static_cast<int>(rng() % 128), 2 + static_cast<int>(rng() % 9)));
        BitMask rebuilt(128, 128);
        for (const auto& r : extract_regions(m)) {
            CHECK(inside(r.rect, 128, 128));
            for (int y = 0; y < r.rect.h; ++y)
                for (int x = 0; x < r.rect.w; ++x)
                    if (r.region_mask.at(x, y)) {
                        CHECK_FALSE(rebuilt.at(r.rect.x + x, r.rect.y + y));
                        rebuilt.set(r.rect.x + x, r.rect.y + y);
                    }
            if (r.feasible) CHECK(CoverageBand{}.contains(r.coverage));
        }
        CHECK(rebuilt == m);
    }
}

TEST_CASE("a blob too large for any window is flagged infeasible") {
    const BitMask m = oracle::square(210, 210, 5, 5, 200);
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 1);
    CHECK_FALSE(regions[0].feasible);
    CHECK(regions[0].coverage > 0.30);
}

TEST_CASE("tiny components are never feasible") {
    const BitMask m = oracle::square(64, 64, 30, 30, 3);
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 1);
    CHECK(popcount(regions[0].region_mask) < kMinComponentPixels);
    CHECK_FALSE(regions[0].feasible);
}

TEST_CASE("a sparse component whose bbox is already below the band is flagged") {
    BitMask m(100, 100);
    for (int i = 0; i < 60; ++i) m.set(20 + i, 20 + i);  // thin diagonal line
    const auto regions = extract_regions(m);
    REQUIRE(regions.size() == 1);
    CHECK_FALSE(regions[0].feasible);
    CHECK(regions[0].coverage < 0.15);
}

TEST_CASE("band and size validation") {
    CHECK_THROWS_AS(extract_regions(BitMask(8, 8), CoverageBand{0.4, 0.2}), Error);
    CHECK_THROWS_AS(extract_regions(RasterImage(8, 8), BitMask(9, 8)), Error);
}
