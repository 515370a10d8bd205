// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/backend.hpp"

#include <algorithm>
#include <cmath>

#include "augment/error.hpp"

namespace augment {

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

} // namespace

void validate(const InpaintRequest& req) {
    if (req.mask.width() != req.base_crop.width() || req.mask.height() != req.base_crop.height()) {
        throw Error(ErrorKind::geometry, "inpaint mask is " +
                                             dims(req.mask.width(), req.mask.height()) +
                                             " but base crop is " +
                                             dims(req.base_crop.width(), req.base_crop.height()));
    }
}

void validate(const SegmentRequest& req) {
    require_inside(req.prompt_box, req.image.width(), req.image.height());
    if (req.hint_mask && (req.hint_mask->width() != req.image.width() ||
                          req.hint_mask->height() != req.image.height())) {
        throw Error(ErrorKind::geometry, "hint mask does not match the image");
    }
}

void validate(const InpaintRequest& req, const InpaintResponse& resp) {
    if (resp.image.width() != req.base_crop.width() ||
        resp.image.height() != req.base_crop.height()) {
        throw Error(ErrorKind::protocol,
                    "inpaint backend returned " + dims(resp.image.width(), resp.image.height()) +
                        " for a " + dims(req.base_crop.width(), req.base_crop.height()) + " crop");
    }
}

void validate(const SegmentRequest& req, const SegmentResponse& resp) {
    if (resp.mask.width() != req.image.width() || resp.mask.height() != req.image.height()) {
        throw Error(ErrorKind::protocol,
                    "segment backend returned a " + dims(resp.mask.width(), resp.mask.height()) +
                        " mask for a " + dims(req.image.width(), req.image.height()) + " image");
    }
    if (!(resp.confidence >= 0.0 && resp.confidence <= 1.0)) {
        throw Error(ErrorKind::protocol, "segment confidence outside [0, 1]");
    }
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error(ErrorKind::protocol, "embedding dimensions differ: " +
                                             std::to_string(u.size()) + " vs " +
                                             std::to_string(v.size()));
    }
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw Error(ErrorKind::numeric, "cosine of a zero vector");
    const double c = dot / (std::sqrt(uu) * std::sqrt(vv));
    if (!std::isfinite(c)) throw Error(ErrorKind::numeric, "cosine is not finite");
    return std::clamp(c, -1.0, 1.0);
}

} // namespace augment
