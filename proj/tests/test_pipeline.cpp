// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numeric>
#include <random>
#include <thread>

#include <httplib.h>

#include "augment/codec.hpp"
#include "augment/error.hpp"
#include "augment/mock_backend.hpp"
#include "augment/pipeline.hpp"
#include "oracles.hpp"

using namespace augment;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

BitMask two_blobs(int size = 128) {
    return mask_union(oracle::disk(size, size, size / 4, size / 4, size / 12),
                      oracle::disk(size, size, 3 * size / 4, 2 * size / 3, size / 14));
}

PipelineConfig small_config(std::size_t samples) {
    PipelineConfig cfg;
    cfg.generation.variations_per_region = 2;
    cfg.samples = samples;
    cfg.seed = 1234;
    return cfg;
}

} // namespace

TEST_CASE("config json round-trip and validation") {
    const json j = {{"seed", 9},
                    {"samples", 50},
                    {"band", {0.1, 0.4}},
                    {"generation", {{"variations_per_region", 3}, {"similarity_threshold", 0.5}}},
                    {"backends", {{"mode", "http"}, {"embed", {{"endpoint", "http://e:1"}, {"bearer_token", "t"}}}}}};
    const auto cfg = pipeline_config_from_json(j);
    CHECK(cfg.seed == 9);
    CHECK(cfg.samples == 50);
    CHECK(cfg.band.low == 0.1);
    CHECK(cfg.generation.variations_per_region == 3);
    CHECK(cfg.generation.max_attempts == 5);
    CHECK(cfg.backend_mode == BackendMode::http);
    CHECK(cfg.http.embed.endpoint == "http://e:1");
    CHECK(cfg.http.embed.bearer_token == "t");
    const json out = to_json(cfg);
    CHECK(out.dump().find("bearer") == std::string::npos);
    const auto again = pipeline_config_from_json(out);
    CHECK(to_json(again) == out);

    for (const json& bad : {json{{"band", {0.5, 0.2}}}, json{{"generation", {{"variations_per_region", 0}}}},
                            json{{"generation", {{"max_attempts", 0}}}}, json{{"seed", "x"}},
                            json{{"backends", {{"mode", "gpu"}}}}, json::array()}) {
        try {
            pipeline_config_from_json(bad);
            FAIL("expected a config error for " << bad.dump());
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::config);
        }
    }
}

TEST_CASE("quota allocation is even, capped and complete") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> sizes(1 + rng() % 6);
        for (auto& s : sizes) s = rng() % 40;
        const std::size_t total = rng() % 150;
        const auto q = allocate_quota(total, sizes);
        const std::uint64_t cap = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
        CHECK(std::accumulate(q.begin(), q.end(), std::size_t{0}) == std::min<std::uint64_t>(total, cap));
        std::size_t lo = SIZE_MAX, hi = 0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            CHECK(q[i] <= sizes[i]);
            if (q[i] < sizes[i]) lo = std::min(lo, q[i]);
            hi = std::max<std::size_t>(hi, q[i]);
        }
        // Spaces left unsaturated got within one of the largest share.
        if (lo != SIZE_MAX) CHECK(hi <= lo + 1);
    }
    const std::vector<std::uint64_t> sizes{3, 100, 100};
    CHECK(allocate_quota(10, sizes) == std::vector<std::size_t>{3, 4, 3});
}

TEST_CASE("batch run with mocks is complete, valid and reproducible") {
    const auto root = oracle::temp_dir("pipeline");
    const auto task = oracle::write_task(root, 5, {two_blobs(), two_blobs()}, 128, 128);
    const auto cfg = small_config(10);
    const auto m = run_pipeline(task, root, cfg, make_mock_backends(), root / "a");
    CHECK(m.samples.size() == 15);
    std::size_t generated = 0;
    for (const auto& s : m.samples) {
        if (s.origin != SampleOrigin::generated) continue;
        ++generated;
        CHECK(s.region_count == 2);
        CHECK(s.scores.size() == s.combination_key->choices.size());
    }
    CHECK(generated == 10);
    CHECK(m.provenance.seed == 1234);
    CHECK(m.provenance.config_hash == config_hash(to_json(cfg)));
    CHECK_NOTHROW(load_manifest(root / "a" / "task.json"));

    run_pipeline(task, root, cfg, make_mock_backends(), root / "b");
    std::string why;
    CHECK_MESSAGE(oracle::same_tree(root / "a", root / "b", &why), why);

    auto other = cfg;
    other.seed = 4321;
    run_pipeline(task, root, other, make_mock_backends(), root / "c");
    CHECK_FALSE(oracle::same_tree(root / "a", root / "c", nullptr));
}

TEST_CASE("batch outputs keep base pixels wherever the placement mask is clear") {
    const auto root = oracle::temp_dir("pipeline_preserve");
    const BitMask placement = two_blobs();
    const auto task = oracle::write_task(root, 2, {placement}, 128, 128);
    const auto m = run_pipeline(task, root, small_config(8), make_mock_backends(), root / "out");
    const RasterImage base = read_png_image(root / task.base_pool[0].image);
    for (const auto& s : m.samples) {
        if (s.origin != SampleOrigin::generated) continue;
        const RasterImage img = read_png_image(root / "out" / s.image_path);
        for (int y = 0; y < 128; ++y)
            for (int x = 0; x < 128; ++x)
                if (!placement.at(x, y)) REQUIRE(img.at(x, y) == base.at(x, y));
    }
}

TEST_CASE("HTTP mode against a mock model server matches in-process mocks") {
    httplib::Server server;
    mount_backend_routes(server, make_mock_backends());
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto root = oracle::temp_dir("pipeline_http");
    const auto task = oracle::write_task(root, 2, {two_blobs()}, 128, 128);
    auto cfg = small_config(6);
    run_pipeline(task, root, cfg, make_mock_backends(), root / "mock");
    cfg.backend_mode = BackendMode::http;
    const std::string url = "http://127.0.0.1:" + std::to_string(port);
    cfg.http.inpaint.endpoint = cfg.http.embed.endpoint = cfg.http.segment.endpoint = url;
    run_pipeline(task, root, cfg, make_backends(cfg), root / "http");
    server.stop();
    t.join();

    // Provenance differs in the backend mode only; compare the sample files.
    std::string why;
    CHECK_MESSAGE(oracle::same_tree(root / "mock" / "images", root / "http" / "images", &why), why);
    CHECK_MESSAGE(oracle::same_tree(root / "mock" / "masks", root / "http" / "masks", &why), why);
}

TEST_CASE("unreachable backends fail naming the backend kind") {
    const auto root = oracle::temp_dir("pipeline_down");
    const auto task = oracle::write_task(root, 1, {two_blobs()}, 128, 128);
    auto cfg = small_config(2);
    cfg.backend_mode = BackendMode::http;
    cfg.http.inpaint.endpoint = cfg.http.embed.endpoint = cfg.http.segment.endpoint = "http://127.0.0.1:1";
    cfg.http.embed.max_retries = cfg.http.inpaint.max_retries = 0;
    try {
        run_pipeline(task, root, cfg, make_backends(cfg), root / "out");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::transport);
        CHECK(std::string(e.what()).find("embed backend unreachable") != std::string::npos);
    }
}

TEST_CASE("copy-paste baseline has the same budget and touches only pasted pixels") {
    const auto root = oracle::temp_dir("copy_paste");
    const auto task = oracle::write_task(root, 3, {two_blobs(), two_blobs()}, 128, 128);
    const auto m = run_copy_paste(task, root, small_config(6), root / "out");
    CHECK(m.samples.size() == 3 + 6);
    for (const auto& s : m.samples) {
        if (s.origin != SampleOrigin::copy_paste) continue;
        const RasterImage img = read_png_image(root / "out" / s.image_path);
        const BitMask mask = read_png_mask(root / "out" / s.mask_path);
        const std::size_t b = s.base_id == "base_000" ? 0 : 1;
        const RasterImage base = read_png_image(root / task.base_pool[b].image);
        CHECK(oracle::count_set(mask) > 0);
        for (int y = 0; y < 128; ++y)
            for (int x = 0; x < 128; ++x)
                if (!mask.at(x, y)) REQUIRE(img.at(x, y) == base.at(x, y));
    }
    run_copy_paste(task, root, small_config(6), root / "again");
    CHECK(oracle::same_tree(root / "out", root / "again", nullptr));
}
