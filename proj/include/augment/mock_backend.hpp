// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "augment/backend.hpp"

namespace augment {

// Deterministic stand-ins for the model servers. Each is a pure function of
// its request.

// Scales the reference (nearest-neighbour) onto the mask's bounding box and
// pastes it over base_crop where mask = 1, shifted by a small seed-derived
// per-channel offset. Pixels outside the mask are returned untouched.
class StampInpainter final : public InpaintBackend {
  public:
    InpaintResponse inpaint(const InpaintRequest& req) override;
};

// 64-bin RGB histogram (4 levels per channel), L2-normalised.
class HistogramEmbedder final : public EmbedBackend {
  public:
    static constexpr int kDimension = 64;
    EmbedResponse embed(const EmbedRequest& req) override;
};

// Marks pixels inside prompt_box whose luma differs from the median luma of
// the box border by more than `threshold`.
class ThresholdSegmenter final : public SegmentBackend {
  public:
    static constexpr int kDefaultThreshold = 32;
    explicit ThresholdSegmenter(int threshold = kDefaultThreshold) : threshold_(threshold) {}
    SegmentResponse segment(const SegmentRequest& req) override;

  private:
    int threshold_;
};

// Stamp / histogram / threshold trio.
Backends make_mock_backends();

} // namespace augment
