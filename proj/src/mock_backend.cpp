// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>

namespace augment {

InpaintResponse StampInpainter::inpaint(const InpaintRequest& req) {
    validate(req);
    RasterImage out = req.base_crop;
    if (const auto box = bounding_box(req.mask)) {
        const RasterImage stamp = resize_nearest(req.reference, box->w, box->h);
        int offset[3];
        for (int c = 0; c < 3; ++c)
            offset[c] = static_cast<int>(mix64(req.seed ^ static_cast<std::uint64_t>(c)) % 17) - 8;
        for (int y = box->y; y < box->bottom(); ++y) {
            for (int x = box->x; x < box->right(); ++x) {
                if (!req.mask.at(x, y)) continue;
                const Pixel src = stamp.at(x - box->x, y - box->y);
                Pixel px;
                for (int c = 0; c < 3; ++c)
                    px[c] = static_cast<std::uint8_t>(std::clamp(src[c] + offset[c], 0, 255));
                out.set(x, y, px);
            }
        }
    }
    return {std::move(out), "mock-stamp", 0.0};
}

EmbedResponse HistogramEmbedder::embed(const EmbedRequest& req) {
    std::vector<double> hist(kDimension, 0.0);
    const auto& img = req.image;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Pixel p = img.at(x, y);
            hist[(p[0] >> 6) * 16 + (p[1] >> 6) * 4 + (p[2] >> 6)] += 1.0;
        }
    }
    double norm = 0.0;
    for (double v : hist) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : hist) v /= norm;
    return {std::move(hist)};
}

SegmentResponse ThresholdSegmenter::segment(const SegmentRequest& req) {
    validate(req);
    const Rect& box = req.prompt_box;
    std::vector<int> border;
    for (int y = box.y; y < box.bottom(); ++y) {
        for (int x = box.x; x < box.right(); ++x) {
            if (y == box.y || y == box.bottom() - 1 || x == box.x || x == box.right() - 1)
                border.push_back(luminance(req.image.at(x, y)));
        }
    }
    std::nth_element(border.begin(), border.begin() + (border.size() - 1) / 2, border.end());
    const int median = border[(border.size() - 1) / 2];

    SegmentResponse resp{BitMask(req.image.width(), req.image.height()), 0.0};
    std::size_t count = 0;
    double diff_sum = 0.0;
    for (int y = box.y; y < box.bottom(); ++y) {
        for (int x = box.x; x < box.right(); ++x) {
            const int diff = std::abs(luminance(req.image.at(x, y)) - median);
            if (diff > threshold_) {
                resp.mask.set(x, y);
                ++count;
                diff_sum += diff;
            }
        }
    }
    if (count > 0) resp.confidence = std::min(1.0, diff_sum / (255.0 * static_cast<double>(count)));
    return resp;
}

Backends make_mock_backends() {
    return {std::make_shared<StampInpainter>(), std::make_shared<HistogramEmbedder>(),
            std::make_shared<ThresholdSegmenter>()};
}

} // namespace augment
