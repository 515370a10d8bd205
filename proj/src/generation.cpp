// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/generation.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "augment/error.hpp"

namespace augment {

void GenerationConfig::validate() const {
    if (variations_per_region < 1) throw Error(ErrorKind::config, "variations_per_region must be >= 1");
    if (max_attempts < 1) throw Error(ErrorKind::config, "max_attempts must be >= 1");
    if (dilation_radius < 0) throw Error(ErrorKind::config, "dilation_radius must be >= 0");
    if (!(similarity_threshold >= -1.0 && similarity_threshold <= 1.0))
        throw Error(ErrorKind::config, "similarity_threshold must lie in [-1, 1]");
    if (!(min_refined_fraction >= 0.0 && min_refined_fraction <= 1.0))
        throw Error(ErrorKind::config, "min_refined_fraction must lie in [0, 1]");
    if (workers < 1) throw Error(ErrorKind::config, "workers must be >= 1");
}

namespace {

Rect mask_box(const RegionSpec& region) {
    if (auto box = bounding_box(region.region_mask)) return *box;
    return region.region_mask.bounds();
}

void require_rect_sized(const RasterImage& candidate, const RegionSpec& region) {
    if (candidate.width() != region.rect.w || candidate.height() != region.rect.h) {
        throw Error(ErrorKind::geometry, "candidate is " + std::to_string(candidate.width()) + "x" +
                                             std::to_string(candidate.height()) + " but " +
                                             to_string(region.rect) + " was expected");
    }
}

std::string attempt_context(std::size_t n, std::size_t l, int attempt) {
    return "region " + std::to_string(n) + ", variation " + std::to_string(l) + ", attempt " +
           std::to_string(attempt);
}

struct Candidate {
    RasterImage image;
    double similarity;
    std::size_t reference;
    int attempt;
};

Variation generate_one(const RegionSpec& region, const RasterImage& base_crop,
                       std::span<const RasterImage> references,
                       std::span<const std::vector<double>> reference_embeddings,
                       const GenerationConfig& cfg, const Backends& backends, const RunSeed& seed,
                       std::size_t l) {
    const std::size_t k_count = references.size();
    std::optional<Candidate> best;
    int attempts = 0;
    for (int a = 0; a < cfg.max_attempts; ++a) {
        const std::size_t k = (l + static_cast<std::size_t>(a)) % k_count;
        attempts = a + 1;
        try {
            InpaintRequest req{base_crop, region.region_mask, references[k],
                               seed.derive(region.index, l, static_cast<std::uint64_t>(a))};
            auto resp = backends.inpaint->inpaint(req);
            validate(req, resp);
            const auto emb = backends.embed->embed({object_area(resp.image, region)});
            const double sim = cosine(emb.vector, reference_embeddings[k]);
            if (!best || sim > best->similarity)
                best = Candidate{std::move(resp.image), sim, k, a};
            if (sim >= cfg.similarity_threshold) break;
        } catch (const Error& e) {
            throw e.with_context(attempt_context(region.index, l, a));
        }
    }

    Variation v{.region_index = region.index,
                .variation_index = l,
                .image = std::move(best->image),
                .refined_mask = region.region_mask,
                .similarity = best->similarity,
                .reference_index = l % k_count,
                .kept_reference_index = best->reference,
                .attempts_used = attempts};
    if (best->similarity < cfg.similarity_threshold) v.flags |= kBelowThreshold;
    try {
        auto [mask, flags] = refine_mask(v.image, region, cfg, *backends.segment);
        v.refined_mask = std::move(mask);
        v.flags |= flags;
    } catch (const Error& e) {
        throw e.with_context(attempt_context(region.index, l, best->attempt));
    }
    return v;
}

} // namespace

RasterImage object_area(const RasterImage& candidate, const RegionSpec& region) {
    require_rect_sized(candidate, region);
    return crop(candidate, mask_box(region));
}

std::vector<Variation> generate_region_variations(const RegionSpec& region,
                                                  const RasterImage& base,
                                                  std::span<const RasterImage> references,
                                                  const GenerationConfig& cfg,
                                                  const Backends& backends, const RunSeed& seed,
                                                  const ProgressFn& progress) {
    cfg.validate();
    if (references.empty())
        throw Error(ErrorKind::config, "at least one reference image is required");
    if (!backends.inpaint || !backends.embed || !backends.segment)
        throw Error(ErrorKind::config, "all three backends must be configured");

    const RasterImage base_crop = crop(base, region.rect);
    std::vector<std::vector<double>> ref_embeddings;
    ref_embeddings.reserve(references.size());
    for (std::size_t k = 0; k < references.size(); ++k) {
        try {
            ref_embeddings.push_back(backends.embed->embed({references[k]}).vector);
        } catch (const Error& e) {
            throw e.with_context("embedding reference " + std::to_string(k));
        }
    }

    const auto total = static_cast<std::size_t>(cfg.variations_per_region);
    std::vector<std::optional<Variation>> slots(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::size_t failure_index = total;

    auto worker = [&] {
        for (;;) {
            const std::size_t l = next.fetch_add(1);
            if (l >= total) return;
            try {
                slots[l] = generate_one(region, base_crop, references, ref_embeddings, cfg,
                                        backends, seed, l);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                // Report the lowest failing variation so errors are deterministic.
                if (l < failure_index) {
                    failure_index = l;
                    failure = std::current_exception();
                }
                next.store(total);
                return;
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress) progress(finished, total);
        }
    };

    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), total);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Variation> out;
    out.reserve(total);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::pair<BitMask, unsigned> refine_mask(const RasterImage& candidate, const RegionSpec& region,
                                         const GenerationConfig& cfg, SegmentBackend& segmenter) {
    require_rect_sized(candidate, region);
    const SegmentRequest req{candidate, mask_box(region), std::nullopt};
    const auto resp = segmenter.segment(req);
    validate(req, resp);
    BitMask refined = mask_intersection(resp.mask, dilate(region.region_mask, cfg.dilation_radius));
    const double region_area = static_cast<double>(popcount(region.region_mask));
    if (static_cast<double>(popcount(refined)) < cfg.min_refined_fraction * region_area)
        return {region.region_mask, kMaskFallback};
    return {std::move(refined), kNoFlags};
}

void composite_region_into(RasterImage& image, const RegionSpec& region,
                           const RasterImage& candidate) {
    require_rect_sized(candidate, region);
    require_inside(region.rect, image.width(), image.height());
    for (int y = 0; y < region.rect.h; ++y)
        for (int x = 0; x < region.rect.w; ++x)
            if (region.region_mask.at(x, y))
                image.set(region.rect.x + x, region.rect.y + y, candidate.at(x, y));
}

RasterImage composite_region(const RasterImage& base, const RegionSpec& region,
                             const RasterImage& candidate) {
    RasterImage out = base;
    composite_region_into(out, region, candidate);
    return out;
}

} // namespace augment
