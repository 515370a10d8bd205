// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

// Instrumented and rigged backends for tests.

#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <vector>

#include "augment/backend.hpp"
#include "augment/error.hpp"
#include "augment/mock_backend.hpp"

namespace rigged {

// Stamp inpainter that counts calls and records the references it saw.
class CountingInpainter final : public augment::InpaintBackend {
  public:
    augment::InpaintResponse inpaint(const augment::InpaintRequest& req) override {
        ++calls;
        {
            std::lock_guard lock(mutex);
            seen.push_back(req);
        }
        return stamp.inpaint(req);
    }
    std::atomic<int> calls{0};
    std::mutex mutex;
    std::vector<augment::InpaintRequest> seen;

  private:
    augment::StampInpainter stamp;
};

// Embeds any registered reference as e0 and everything else as e1, so no
// candidate ever resembles a reference.
class OrthogonalEmbedder final : public augment::EmbedBackend {
  public:
    explicit OrthogonalEmbedder(std::vector<augment::RasterImage> references)
        : references_(std::move(references)) {}
    augment::EmbedResponse embed(const augment::EmbedRequest& req) override {
        ++calls;
        for (const auto& r : references_)
            if (r == req.image) return {{1.0, 0.0}};
        return {{0.0, 1.0}};
    }
    std::atomic<int> calls{0};

  private:
    std::vector<augment::RasterImage> references_;
};

// Scores each candidate by a hash of its pixels: references map to e0 and a
// candidate to (cos t, sin t) with t drawn from the hash.
class HashAngleEmbedder final : public augment::EmbedBackend {
  public:
    explicit HashAngleEmbedder(std::vector<augment::RasterImage> references)
        : references_(std::move(references)) {}
    augment::EmbedResponse embed(const augment::EmbedRequest& req) override {
        for (const auto& r : references_)
            if (r == req.image) return {{1.0, 0.0}};
        std::uint64_t h = 1469598103934665603ull;
        for (auto b : req.image.bytes()) h = (h ^ b) * 1099511628211ull;
        const double t = static_cast<double>(h % 10007) / 10007.0 * 3.14159265358979;
        return {{std::cos(t), std::sin(t)}};
    }

  private:
    std::vector<augment::RasterImage> references_;
};

// Returns a fixed mask for every request.
class FixedSegmenter final : public augment::SegmentBackend {
  public:
    explicit FixedSegmenter(augment::BitMask mask) : mask_(std::move(mask)) {}
    augment::SegmentResponse segment(const augment::SegmentRequest&) override { return {mask_, 1.0}; }

  private:
    augment::BitMask mask_;
};

// Fails every call with the given error kind.
class FailingInpainter final : public augment::InpaintBackend {
  public:
    augment::InpaintResponse inpaint(const augment::InpaintRequest&) override {
        throw augment::Error(augment::ErrorKind::transport, "inpaint backend unreachable");
    }
};

} // namespace rigged
