// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "augment/generation.hpp"
#include "augment/imaging.hpp"
#include "augment/regions.hpp"

namespace augment {

inline constexpr std::size_t kMaxRegions = 63;

// Which regions are included (bit n = region n) and, for each included region
// in ascending order, the chosen variation index.
struct CombinationKey {
    std::uint64_t region_bits = 0;
    std::vector<std::uint32_t> choices;

    std::size_t selected_count() const noexcept;
    bool includes(std::size_t region) const noexcept { return (region_bits >> region) & 1u; }
    // Variation chosen for an included region.
    std::uint32_t choice_for(std::size_t region) const;

    auto operator<=>(const CombinationKey&) const = default;
};

// "0b101:2,0" form. Bits are written most-significant first without leading zeros.
std::string to_string(const CombinationKey& key);
CombinationKey parse_combination_key(std::string_view text);

// Throws Error(validation) unless the key is a valid selection for N regions
// with L variations each.
void validate_key(const CombinationKey& key, std::size_t regions, std::size_t variations);

// Sum over k of C(N, k) L^k, cross-checked against (L + 1)^N - 1.
// Throws Error(overflow) if the count does not fit in 64 bits.
std::uint64_t count_combinations(std::uint64_t regions, std::uint64_t variations);

// Per-region lists of allowed variation indices. The full space for (N, L)
// allows every index; rejected variations are removed from their region.
class ChoiceSpace {
  public:
    ChoiceSpace(std::size_t regions, std::size_t variations);
    explicit ChoiceSpace(std::vector<std::vector<std::uint32_t>> allowed);

    std::size_t regions() const noexcept { return allowed_.size(); }
    const std::vector<std::uint32_t>& allowed(std::size_t region) const { return allowed_[region]; }
    void remove(std::size_t region, std::uint32_t variation);

    // prod(allowed_n + 1) - 1; nullopt when it does not fit in 64 bits.
    std::optional<std::uint64_t> size() const noexcept;

  private:
    std::vector<std::vector<std::uint32_t>> allowed_;
};

// Streams keys in canonical order: region_bits ascending, then choices in
// odometer order with the lowest included region changing fastest.
class KeyEnumerator {
  public:
    explicit KeyEnumerator(ChoiceSpace space);
    KeyEnumerator(std::size_t regions, std::size_t variations);

    // Writes the next key into `out`; false when exhausted.
    bool next(CombinationKey& out);

  private:
    bool advance_bits();

    ChoiceSpace space_;
    std::uint64_t bits_ = 0;
    std::uint64_t bits_end_ = 0;
    std::vector<std::size_t> selected_;  // included regions for bits_
    std::vector<std::size_t> digits_;    // odometer positions into allowed lists
    bool started_ = false;
};

std::vector<CombinationKey> enumerate_keys(std::size_t regions, std::size_t variations);
std::vector<CombinationKey> enumerate_keys(const ChoiceSpace& space);

// One key drawn uniformly from the space: a base-(allowed_n + 1) digit per
// region, redrawn while all digits are zero. Requires a non-empty space.
template <class Rng>
CombinationKey draw_key(const ChoiceSpace& space, Rng& rng);

// `count` distinct keys drawn uniformly without replacement, in draw order.
// If count covers the whole space, returns the full enumeration instead.
std::vector<CombinationKey> sample_keys(const ChoiceSpace& space, std::size_t count,
                                        std::uint64_t seed);
std::vector<CombinationKey> sample_keys(std::size_t regions, std::size_t variations,
                                        std::size_t count, std::uint64_t seed);

// A full composite (P_b, P_m) identified by its key.
struct AugmentedSample {
    RasterImage image;
    BitMask mask;
    CombinationKey key;
    std::vector<double> region_scores;
};

AugmentedSample realize(const RasterImage& base, std::span<const RegionSpec> regions,
                        std::span<const std::vector<Variation>> variations,
                        const CombinationKey& key);

struct Instance {
    RasterImage image;
    BitMask mask;
};

// Naive copy-paste baseline. Instance i is scaled (nearest-neighbour) to
// placements[i] and copied where its mask is set. Instances beyond the given
// placements get a random in-bounds placement at native size drawn from `seed`
// (scaled down to fit if larger than the base).
AugmentedSample copy_paste_augment(const RasterImage& base, const BitMask& base_mask,
                                   std::span<const Instance> instances,
                                   std::span<const Rect> placements, std::uint64_t seed);

} // namespace augment

#include "augment/detail/draw_key.ipp"
