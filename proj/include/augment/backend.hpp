// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augment/imaging.hpp"

namespace augment {

struct InpaintRequest {
    RasterImage base_crop;
    BitMask mask;
    RasterImage reference;
    std::uint64_t seed = 0;
};

struct InpaintResponse {
    RasterImage image;
    std::string backend_id;
    double latency_ms = 0.0;
};

struct EmbedRequest {
    RasterImage image;
};

struct EmbedResponse {
    std::vector<double> vector;
};

struct SegmentRequest {
    RasterImage image;
    Rect prompt_box;
    std::optional<BitMask> hint_mask;
};

struct SegmentResponse {
    BitMask mask;
    double confidence = 0.0;
};

// Checks a request's own invariants; throws Error(geometry) on violation.
void validate(const InpaintRequest& req);
void validate(const SegmentRequest& req);

// Checks a response against the request that produced it; throws
// Error(protocol) on a dimension mismatch.
void validate(const InpaintRequest& req, const InpaintResponse& resp);
void validate(const SegmentRequest& req, const SegmentResponse& resp);

class InpaintBackend {
  public:
    virtual ~InpaintBackend() = default;
    virtual InpaintResponse inpaint(const InpaintRequest& req) = 0;
};

class EmbedBackend {
  public:
    virtual ~EmbedBackend() = default;
    virtual EmbedResponse embed(const EmbedRequest& req) = 0;
};

class SegmentBackend {
  public:
    virtual ~SegmentBackend() = default;
    virtual SegmentResponse segment(const SegmentRequest& req) = 0;
};

// Handles are shared; implementations must be safe to call concurrently.
struct Backends {
    std::shared_ptr<InpaintBackend> inpaint;
    std::shared_ptr<EmbedBackend> embed;
    std::shared_ptr<SegmentBackend> segment;
};

// Cosine similarity. Throws Error(protocol) on a dimension mismatch and
// Error(numeric) if either vector is all zeros. Result is clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

} // namespace augment
