// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/evaluation.hpp"

#include <cstdio>
#include <algorithm>
#include <map>

#include "augment/codec.hpp"
#include "augment/error.hpp"

namespace augment {

namespace {

struct Counts {
    std::size_t intersection = 0;
    std::size_t union_ = 0;
};

Counts count(const BitMask& pred, const BitMask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw Error(ErrorKind::geometry, "prediction is " + std::to_string(pred.width()) + "x" +
                                             std::to_string(pred.height()) +
                                             " but ground truth is " + std::to_string(gt.width()) +
                                             "x" + std::to_string(gt.height()));
    Counts c;
    const auto a = pred.bits();
    const auto b = gt.bits();
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.intersection += (a[i] & b[i]);
        c.union_ += (a[i] | b[i]);
    }
    return c;
}

double ratio(const Counts& c) {
    return c.union_ == 0 ? 1.0 : static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

} // namespace

double iou(const BitMask& pred, const BitMask& gt) { return ratio(count(pred, gt)); }

IouReport evaluate(std::span<const Prediction> predictions, const DatasetManifest& manifest,
                   const std::filesystem::path& root) {
    std::map<std::string, const BitMask*> by_id;
    for (const auto& [id, mask] : predictions) {
        if (!manifest.find(id))
            throw Error(ErrorKind::validation, "prediction for unknown sample id \"" + id + "\"");
        by_id[id] = &mask;
    }

    IouReport report;
    report.class_name = manifest.task.class_name;
    std::size_t total_i = 0, total_u = 0;
    double sum = 0.0;
    for (const auto& rec : manifest.samples) {
        const BitMask gt = read_png_mask(root / rec.mask_path);
        ImageIou row;
        row.id = rec.id;
        Counts c;
        if (auto it = by_id.find(rec.id); it != by_id.end()) {
            c = count(*it->second, gt);
        } else {
            row.missing_prediction = true;
            report.missing.push_back(rec.id);
            c = count(BitMask(gt.width(), gt.height()), gt);
        }
        row.intersection = c.intersection;
        row.union_ = c.union_;
        row.iou = ratio(c);
        row.both_empty = c.union_ == 0;
        total_i += c.intersection;
        total_u += c.union_;
        sum += row.iou;
        report.per_image.push_back(std::move(row));
    }
    report.aggregate_iou = total_u == 0 ? 1.0 : static_cast<double>(total_i) / static_cast<double>(total_u);
    report.mean_iou = report.per_image.empty() ? 0.0 : sum / static_cast<double>(report.per_image.size());
    return report;
}

nlohmann::json to_json(const IouReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.per_image) {
        rows.push_back({{"id", r.id},
                        {"intersection", r.intersection},
                        {"union", r.union_},
                        {"iou", r.iou},
                        {"both_empty", r.both_empty},
                        {"missing_prediction", r.missing_prediction}});
    }
    return {{"class_name", report.class_name},
            {"per_image", std::move(rows)},
            {"aggregate_iou", report.aggregate_iou},
            {"mean_iou", report.mean_iou},
            {"missing", report.missing}};
}

std::string format_iou_table(std::span<const std::pair<std::string, IouReport>> rows) {
    std::vector<std::string> classes;
    for (const auto& [method, rep] : rows)
        if (std::find(classes.begin(), classes.end(), rep.class_name) == classes.end())
            classes.push_back(rep.class_name);
    std::vector<std::string> methods;
    for (const auto& [method, rep] : rows)
        if (std::find(methods.begin(), methods.end(), method) == methods.end())
            methods.push_back(method);

    std::size_t method_w = 6;
    for (const auto& m : methods) method_w = std::max(method_w, m.size());
    std::vector<std::size_t> col_w;
    for (const auto& c : classes) col_w.push_back(std::max<std::size_t>(c.size(), 6));

    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out = pad("Method", method_w);
    for (std::size_t i = 0; i < classes.size(); ++i) out += "  " + pad(classes[i], col_w[i]);
    out += "\n" + std::string(method_w, '-');
    for (auto w : col_w) out += "  " + std::string(w, '-');
    out += "\n";
    for (const auto& m : methods) {
        out += pad(m, method_w);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            std::string cell = "-";
            for (const auto& [method, rep] : rows) {
                if (method == m && rep.class_name == classes[i]) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * rep.aggregate_iou);
                    cell = buf;
                }
            }
            out += "  " + pad(cell, col_w[i]);
        }
        out += "\n";
    }
    return out;
}

} // namespace augment
