// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "augment/codec.hpp"
#include "augment/error.hpp"
#include "augment/evaluation.hpp"
#include "oracles.hpp"

using namespace augment;
namespace fs = std::filesystem;

namespace {

// A manifest whose records are the given ground-truth masks, written under root.
DatasetManifest gt_manifest(const fs::path& root, const std::vector<BitMask>& masks) {
    DatasetManifest m;
    m.task.class_name = "bridge";
    fs::create_directories(root / "gt");
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const std::string id = "img" + std::to_string(i);
        write_png(RasterImage(masks[i].width(), masks[i].height()), root / "gt" / (id + ".png"));
        write_png(masks[i], root / "gt" / (id + "_m.png"));
        SampleRecord r;
        r.id = id;
        r.image_path = "gt/" + id + ".png";
        r.mask_path = "gt/" + id + "_m.png";
        m.samples.push_back(r);
    }
    return m;
}

BitMask rows(int w, int h, int from, int count) {
    BitMask m(w, h);
    for (int i = 0; i < count; ++i) m.set(i % w, from + i / w);
    return m;
}

} // namespace

TEST_CASE("iou basics") {
    std::mt19937_64 rng(1);
    const BitMask m = oracle::random_mask(rng, 16, 16, 0.3);
    CHECK(iou(m, m) == 1.0);
    CHECK(iou(BitMask(4, 4), BitMask(4, 4)) == 1.0);
    CHECK(iou(oracle::square(10, 10, 0, 0, 3), oracle::square(10, 10, 5, 5, 3)) == 0.0);
    CHECK_THROWS_AS(iou(BitMask(4, 4), BitMask(4, 5)), Error);
}

TEST_CASE("left half against top half is 25/75") {
    BitMask left(10, 10), top(10, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            left.set(x, y, x < 5);
            top.set(x, y, y < 5);
        }
    CHECK(iou(left, top) == doctest::Approx(25.0 / 75.0).epsilon(1e-15));
}

TEST_CASE("iou matches the counting oracle and is symmetric") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const BitMask a = oracle::random_mask(rng, 16, 16, (i % 10) / 10.0);
        const BitMask b = oracle::random_mask(rng, 16, 16, (i % 7) / 7.0);
        const auto c = oracle::iou_counts(a, b);
        const double expected = c.union_ == 0 ? 1.0 : static_cast<double>(c.intersection) / c.union_;
        CHECK(iou(a, b) == expected);
        CHECK(iou(b, a) == iou(a, b));
        CHECK((iou(a, b) == 1.0) == (a == b));
    }
}

TEST_CASE("aggregate iou sums counts; mean averages ratios") {
    const auto root = oracle::temp_dir("eval");
    // Image 0: gt 100 px, pred 50 of them -> I=50, U=100.
    // Image 1: gt 10 px, pred identical -> I=10, U=10.
    const BitMask gt0 = rows(10, 20, 0, 100), pred0 = rows(10, 20, 0, 50);
    const BitMask gt1 = rows(10, 10, 0, 10);
    const auto m = gt_manifest(root, {gt0, gt1});
    const std::vector<Prediction> preds{{"img0", pred0}, {"img1", gt1}};
    const auto r = evaluate(preds, m, root);
    REQUIRE(r.per_image.size() == 2);
    CHECK(r.per_image[0].intersection == 50);
    CHECK(r.per_image[0].union_ == 100);
    CHECK(r.aggregate_iou == doctest::Approx(60.0 / 110.0));
    CHECK(r.mean_iou == doctest::Approx(0.75));
    CHECK(r.class_name == "bridge");
    CHECK(r.missing.empty());
}

TEST_CASE("aggregate of 0.5 and 0.0 with equal unions") {
    const auto root = oracle::temp_dir("eval2");
    const BitMask gt0 = rows(10, 10, 0, 100), pred0 = rows(10, 10, 0, 50);
    const BitMask gt1 = rows(10, 10, 0, 50), pred1 = rows(10, 10, 5, 50);
    const auto m = gt_manifest(root, {gt0, gt1});
    const std::vector<Prediction> preds{{"img0", pred0}, {"img1", pred1}};
    const auto r = evaluate(preds, m, root);
    CHECK(r.aggregate_iou == doctest::Approx(50.0 / 200.0));
}

TEST_CASE("identical, empty and missing predictions") {
    const auto root = oracle::temp_dir("eval3");
    std::mt19937_64 rng(5);
    const BitMask a = oracle::random_mask(rng, 12, 12, 0.4), b = oracle::random_mask(rng, 12, 12, 0.4);
    const auto m = gt_manifest(root, {a, b});

    const std::vector<Prediction> same{{"img0", a}, {"img1", b}};
    CHECK(evaluate(same, m, root).aggregate_iou == 1.0);

    const std::vector<Prediction> empty{{"img0", BitMask(12, 12)}, {"img1", BitMask(12, 12)}};
    CHECK(evaluate(empty, m, root).aggregate_iou == 0.0);

    const std::vector<Prediction> partial{{"img1", b}};
    const auto r = evaluate(partial, m, root);
    CHECK(r.missing == std::vector<std::string>{"img0"});
    CHECK(r.per_image[0].missing_prediction);
    CHECK(r.per_image[0].iou == 0.0);

    const std::vector<Prediction> unknown{{"nope", a}};
    try {
        evaluate(unknown, m, root);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
}

TEST_CASE("report table and json") {
    const auto root = oracle::temp_dir("eval4");
    const BitMask gt = rows(10, 10, 0, 100);
    const auto m = gt_manifest(root, {gt});
    const std::vector<Prediction> preds{{"img0", rows(10, 10, 0, 50)}};
    const auto r = evaluate(preds, m, root);
    const auto j = to_json(r);
    CHECK(j["aggregate_iou"].get<double>() == doctest::Approx(0.5));
    CHECK(j["per_image"].size() == 1);
    const std::vector<std::pair<std::string, IouReport>> table_rows{{"Ours", r}};
    const auto table = format_iou_table(table_rows);
    CHECK(table.find("bridge") != std::string::npos);
    CHECK(table.find("Ours") != std::string::npos);
    CHECK(table.find("50.00") != std::string::npos);
}
