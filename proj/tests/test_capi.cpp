// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "augment/augment.h"
#include "augment/codec.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Owned {
    char* ptr = nullptr;
    ~Owned() { aug_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

augment::BitMask two_blobs() {
    return augment::mask_union(oracle::disk(96, 96, 24, 24, 8), oracle::disk(96, 96, 70, 66, 7));
}

} // namespace

TEST_CASE("status names and argument checks") {
    CHECK(std::strcmp(aug_status_name(AUG_OK), "ok") == 0);
    CHECK(std::strcmp(aug_status_name(AUG_ERR_OVERFLOW), "overflow") == 0);
    CHECK(aug_count_combinations(2, 2, nullptr) == AUG_ERR_INVALID_ARGUMENT);
    CHECK(std::string(aug_last_error()).find("NULL") != std::string::npos);
    CHECK(std::strlen(aug_version()) > 0);
}

TEST_CASE("combination counts and keys") {
    uint64_t n = 0;
    REQUIRE(aug_count_combinations(3, 2, &n) == AUG_OK);
    CHECK(n == 26);
    CHECK(aug_count_combinations(65, 1, &n) == AUG_ERR_OVERFLOW);
    CHECK(aug_count_combinations(0, 1, &n) == AUG_ERR_VALIDATION);

    Owned lines;
    REQUIRE(aug_combination_keys(2, 1, 0, 0, &lines.ptr) == AUG_OK);
    CHECK(lines.str() == "0b1:0\n0b10:0\n0b11:0,0\n");
    Owned sampled;
    REQUIRE(aug_combination_keys(4, 8, 1000, 5, &sampled.ptr) == AUG_OK);
    const std::string text = sampled.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1000);
}

TEST_CASE("images, masks and regions") {
    const auto dir = oracle::temp_dir("capi_io");
    augment::write_png(two_blobs(), dir / "m.png");
    aug_mask* m = nullptr;
    REQUIRE(aug_mask_load((dir / "m.png").c_str(), &m) == AUG_OK);
    CHECK(aug_mask_width(m) == 96);
    double cov = 0;
    REQUIRE(aug_mask_coverage(m, &cov) == AUG_OK);
    CHECK(cov == doctest::Approx(static_cast<double>(oracle::count_set(two_blobs())) / (96 * 96)));
    Owned regions;
    REQUIRE(aug_extract_regions(m, 0.15, 0.30, &regions.ptr) == AUG_OK);
    CHECK(json::parse(regions.str()).size() == 2);
    CHECK(aug_extract_regions(m, 0.5, 0.1, &regions.ptr) == AUG_ERR_CONFIG);
    REQUIRE(aug_mask_save(m, (dir / "copy.png").c_str()) == AUG_OK);
    aug_mask_free(m);

    aug_image* img = nullptr;
    CHECK(aug_image_load((dir / "missing.png").c_str(), &img) == AUG_ERR_IO);
    CHECK(std::string(aug_last_error()).find("missing.png") != std::string::npos);
}

TEST_CASE("pipeline, validation and evaluation through the C API") {
    const auto root = oracle::temp_dir("capi_pipeline");
    const auto task = oracle::write_task(root, 2, {two_blobs()}, 96, 96);
    const json config = {{"task", augment::to_json(task)}, {"seed", 5}, {"samples", 4},
                         {"generation", {{"variations_per_region", 2}}}};
    aug_pipeline* p = nullptr;
    REQUIRE(aug_pipeline_create(config.dump().c_str(), root.c_str(), &p) == AUG_OK);
    CHECK(aug_pipeline_set_variations(p, 0) == AUG_ERR_CONFIG);
    CHECK(aug_pipeline_set_threshold(p, 0.1) == AUG_OK);
    CHECK(aug_pipeline_set_samples(p, 6) == AUG_OK);
    Owned cfg;
    REQUIRE(aug_pipeline_config(p, &cfg.ptr) == AUG_OK);
    CHECK(json::parse(cfg.str())["generation"]["similarity_threshold"] == 0.1);
    CHECK(json::parse(cfg.str())["samples"] == 6);

    Owned summary;
    const auto out = root / "out";
    REQUIRE(aug_pipeline_generate(p, out.c_str(), &summary.ptr) == AUG_OK);
    CHECK(json::parse(summary.str())["records"] == 8);

    size_t records = 0;
    REQUIRE(aug_manifest_validate((out / "task.json").c_str(), &records) == AUG_OK);
    CHECK(records == 8);

    // Predictions identical to the ground truth score 100%.
    fs::create_directories(root / "pred");
    const auto manifest = json::parse(augment::read_file(out / "task.json"));
    for (const auto& s : manifest["samples"])
        fs::copy_file(out / s["mask"].get<std::string>(), root / "pred" / (s["id"].get<std::string>() + ".png"));
    Owned report, table;
    REQUIRE(aug_evaluate((out / "task.json").c_str(), (root / "pred").c_str(), "Ours", &report.ptr, &table.ptr) ==
            AUG_OK);
    CHECK(json::parse(report.str())["aggregate_iou"] == 1.0);
    CHECK(table.str().find("100.00") != std::string::npos);

    Owned cp;
    REQUIRE(aug_pipeline_copy_paste(p, (root / "cp").c_str(), &cp.ptr) == AUG_OK);
    CHECK(json::parse(cp.str())["by_origin"]["copy_paste"] == 6);

    aug_service* svc = nullptr;
    REQUIRE(aug_service_create(p, (root / "studio").c_str(), 1, &svc) == AUG_OK);
    int port = 0;
    REQUIRE(aug_service_bind(svc, "127.0.0.1", 0, &port) == AUG_OK);
    CHECK(port > 0);
    std::thread t([&] { aug_service_listen(svc); });
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    aug_service_stop(svc);
    t.join();
    aug_service_free(svc);
    CHECK(fs::exists(root / "studio" / "task.json"));
    aug_pipeline_free(p);

    CHECK(aug_pipeline_create("{}", root.c_str(), &p) == AUG_ERR_CONFIG);
    CHECK(aug_pipeline_create("{", root.c_str(), &p) == AUG_ERR_CONFIG);
}

TEST_CASE("training pairs through the C API") {
    const auto root = oracle::temp_dir("capi_pairs");
    std::mt19937_64 rng(4);
    augment::write_png(oracle::random_image(rng, 32, 32), root / "a.png");
    {
        std::ofstream(root / "boxes.txt") << "# id x y w h\na 1 2 10 8\na 0 0 32 32\n";
    }
    size_t n = 0;
    REQUIRE(aug_extract_pairs((root / "boxes.txt").c_str(), root.c_str(), (root / "pairs").c_str(), &n) == AUG_OK);
    CHECK(n == 2);
    CHECK(fs::exists(root / "pairs" / "references" / "a_0.png"));
    {
        std::ofstream(root / "bad.txt") << "a 30 30 10 10\n";
    }
    CHECK(aug_extract_pairs((root / "bad.txt").c_str(), root.c_str(), (root / "pairs").c_str(), &n) ==
          AUG_ERR_GEOMETRY);
}
