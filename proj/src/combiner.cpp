// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#include "augment/combiner.hpp"

#include <bit>
#include <charconv>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "augment/error.hpp"

namespace augment {

namespace {

using u128 = unsigned __int128;
constexpr u128 kU64Max = std::numeric_limits<std::uint64_t>::max();

bool mul_checked(u128 a, u128 b, u128& out) {
    if (a != 0 && b > kU64Max / a) return false;  // keep products within 64 bits
    out = a * b;
    return true;
}

[[noreturn]] void overflow(std::uint64_t n, std::uint64_t l) {
    throw Error(ErrorKind::overflow, "combination count for N=" + std::to_string(n) +
                                         ", L=" + std::to_string(l) +
                                         " does not fit in 64 bits");
}

} // namespace

std::size_t CombinationKey::selected_count() const noexcept {
    return static_cast<std::size_t>(std::popcount(region_bits));
}

std::uint32_t CombinationKey::choice_for(std::size_t region) const {
    if (!includes(region))
        throw Error(ErrorKind::validation, "region " + std::to_string(region) + " is not selected");
    const auto below = region_bits & ((std::uint64_t{1} << region) - 1);
    return choices.at(static_cast<std::size_t>(std::popcount(below)));
}

std::string to_string(const CombinationKey& key) {
    std::string bits;
    for (std::uint64_t b = key.region_bits; b != 0; b >>= 1) bits.insert(bits.begin(), (b & 1) ? '1' : '0');
    if (bits.empty()) bits = "0";
    std::string out = "0b" + bits + ":";
    for (std::size_t i = 0; i < key.choices.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(key.choices[i]);
    }
    return out;
}

CombinationKey parse_combination_key(std::string_view text) {
    auto bad = [&](const char* why) -> Error {
        return Error(ErrorKind::validation,
                     "malformed combination key \"" + std::string(text) + "\": " + why);
    };
    if (text.substr(0, 2) != "0b") throw bad("expected 0b prefix");
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw bad("expected ':'");
    const auto bits = text.substr(2, colon - 2);
    if (bits.empty() || bits.size() > 64) throw bad("bad bit string length");
    CombinationKey key;
    for (char c : bits) {
        if (c != '0' && c != '1') throw bad("bits must be 0 or 1");
        key.region_bits = (key.region_bits << 1) | static_cast<std::uint64_t>(c == '1');
    }
    if (key.region_bits == 0) throw bad("no region selected");
    auto rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto tok = rest.substr(0, comma);
        std::uint32_t v = 0;
        const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || end != tok.data() + tok.size())
            throw bad("choices must be non-negative integers");
        key.choices.push_back(v);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
        if (rest.empty()) throw bad("trailing comma");
    }
    if (key.choices.size() != key.selected_count())
        throw bad("choice count does not match the number of selected regions");
    return key;
}

void validate_key(const CombinationKey& key, std::size_t regions, std::size_t variations) {
    const std::string name = to_string(key);
    if (key.region_bits == 0)
        throw Error(ErrorKind::validation, "key " + name + " selects no region");
    if (regions < 64 && (key.region_bits >> regions) != 0)
        throw Error(ErrorKind::validation, "key " + name + " selects a region beyond N=" +
                                               std::to_string(regions));
    if (key.choices.size() != key.selected_count())
        throw Error(ErrorKind::validation, "key " + name + " has " +
                                               std::to_string(key.choices.size()) +
                                               " choices for " +
                                               std::to_string(key.selected_count()) + " regions");
    for (auto c : key.choices)
        if (c >= variations)
            throw Error(ErrorKind::validation, "key " + name + " chooses variation " +
                                                   std::to_string(c) + " but L=" +
                                                   std::to_string(variations));
}

std::uint64_t count_combinations(std::uint64_t n, std::uint64_t l) {
    if (n < 1 || l < 1)
        throw Error(ErrorKind::validation, "count_combinations requires N >= 1 and L >= 1");
    if (n > 64) overflow(n, l);  // the sum is at least 2^N - 1

    // Sum over k of C(N, k) L^k.
    u128 sum = 0;
    u128 binom = 1;  // C(N, k)
    u128 power = 1;  // L^k
    for (std::uint64_t k = 1; k <= n; ++k) {
        binom = binom * (n - k + 1) / k;  // exact; C(N,k) <= 2^64 for N <= 64
        if (!mul_checked(power, l, power)) overflow(n, l);
        u128 term = 0;
        if (binom > kU64Max || !mul_checked(binom, power, term)) overflow(n, l);
        sum += term;
        if (sum > kU64Max) overflow(n, l);
    }

    // Closed form (L + 1)^N - 1.
    u128 closed = 1;
    for (std::uint64_t k = 0; k < n; ++k) {
        if (closed > (kU64Max + u128{1}) / (l + 1)) overflow(n, l);
        closed *= (l + 1);
    }
    closed -= 1;
    if (closed != sum)
        throw std::logic_error("combination count disagrees with (L+1)^N - 1");
    return static_cast<std::uint64_t>(sum);
}

ChoiceSpace::ChoiceSpace(std::size_t regions, std::size_t variations) {
    if (regions > kMaxRegions)
        throw Error(ErrorKind::validation, "at most " + std::to_string(kMaxRegions) +
                                               " regions are supported");
    std::vector<std::uint32_t> all(variations);
    for (std::size_t i = 0; i < variations; ++i) all[i] = static_cast<std::uint32_t>(i);
    allowed_.assign(regions, all);
}

ChoiceSpace::ChoiceSpace(std::vector<std::vector<std::uint32_t>> allowed)
    : allowed_(std::move(allowed)) {
    if (allowed_.size() > kMaxRegions)
        throw Error(ErrorKind::validation, "at most " + std::to_string(kMaxRegions) +
                                               " regions are supported");
}

void ChoiceSpace::remove(std::size_t region, std::uint32_t variation) {
    auto& a = allowed_.at(region);
    std::erase(a, variation);
}

std::optional<std::uint64_t> ChoiceSpace::size() const noexcept {
    u128 product = 1;
    for (const auto& a : allowed_) {
        if (!mul_checked(product, a.size() + 1, product)) return std::nullopt;
    }
    return static_cast<std::uint64_t>(product - 1);
}

KeyEnumerator::KeyEnumerator(ChoiceSpace space)
    : space_(std::move(space)), bits_end_(std::uint64_t{1} << space_.regions()) {}

KeyEnumerator::KeyEnumerator(std::size_t regions, std::size_t variations)
    : KeyEnumerator(ChoiceSpace(regions, variations)) {}

bool KeyEnumerator::advance_bits() {
    while (++bits_ < bits_end_) {
        selected_.clear();
        bool usable = true;
        for (std::size_t n = 0; n < space_.regions(); ++n) {
            if (!((bits_ >> n) & 1u)) continue;
            if (space_.allowed(n).empty()) {
                usable = false;
                break;
            }
            selected_.push_back(n);
        }
        if (usable) {
            digits_.assign(selected_.size(), 0);
            return true;
        }
    }
    return false;
}

bool KeyEnumerator::next(CombinationKey& out) {
    if (!started_) {
        started_ = true;
        bits_ = 0;
        if (!advance_bits()) return false;
    } else {
        std::size_t i = 0;
        for (; i < selected_.size(); ++i) {
            if (++digits_[i] < space_.allowed(selected_[i]).size()) break;
            digits_[i] = 0;
        }
        if (i == selected_.size() && !advance_bits()) {
            bits_ = bits_end_;
            return false;
        }
    }
    if (bits_ >= bits_end_) return false;
    out.region_bits = bits_;
    out.choices.resize(selected_.size());
    for (std::size_t i = 0; i < selected_.size(); ++i)
        out.choices[i] = space_.allowed(selected_[i])[digits_[i]];
    return true;
}

std::vector<CombinationKey> enumerate_keys(const ChoiceSpace& space) {
    std::vector<CombinationKey> out;
    KeyEnumerator it(space);
    CombinationKey key;
    while (it.next(key)) out.push_back(key);
    return out;
}

std::vector<CombinationKey> enumerate_keys(std::size_t regions, std::size_t variations) {
    return enumerate_keys(ChoiceSpace(regions, variations));
}

std::vector<CombinationKey> sample_keys(const ChoiceSpace& space, std::size_t count,
                                        std::uint64_t seed) {
    const auto total = space.size();
    if (count == 0 || (total && *total == 0)) return {};
    if (total && count >= *total) return enumerate_keys(space);

    std::mt19937_64 rng(seed);
    std::set<CombinationKey> seen;
    std::vector<CombinationKey> out;
    out.reserve(count);
    while (out.size() < count) {
        auto key = draw_key(space, rng);
        if (seen.insert(key).second) out.push_back(std::move(key));
    }
    return out;
}

std::vector<CombinationKey> sample_keys(std::size_t regions, std::size_t variations,
                                        std::size_t count, std::uint64_t seed) {
    return sample_keys(ChoiceSpace(regions, variations), count, seed);
}

AugmentedSample realize(const RasterImage& base, std::span<const RegionSpec> regions,
                        std::span<const std::vector<Variation>> variations,
                        const CombinationKey& key) {
    if (regions.size() != variations.size())
        throw Error(ErrorKind::validation, "have " + std::to_string(regions.size()) +
                                               " regions but " +
                                               std::to_string(variations.size()) +
                                               " variation lists");
    if (regions.empty()) throw Error(ErrorKind::validation, "no regions to combine");
    const std::size_t l = variations.front().size();
    for (std::size_t n = 0; n < variations.size(); ++n)
        if (variations[n].size() != l)
            throw Error(ErrorKind::validation, "region " + std::to_string(n) + " has " +
                                                   std::to_string(variations[n].size()) +
                                                   " variations, expected " + std::to_string(l));
    validate_key(key, regions.size(), l);

    AugmentedSample out{base, BitMask(base.width(), base.height()), key, {}};
    for (std::size_t n = 0; n < regions.size(); ++n) {
        if (!key.includes(n)) continue;
        const auto& region = regions[n];
        const auto& v = variations[n][key.choice_for(n)];
        composite_region_into(out.image, region, v.image);
        for (int y = 0; y < region.rect.h; ++y)
            for (int x = 0; x < region.rect.w; ++x)
                if (v.refined_mask.at(x, y)) out.mask.set(region.rect.x + x, region.rect.y + y);
        out.region_scores.push_back(v.similarity);
    }
    return out;
}

AugmentedSample copy_paste_augment(const RasterImage& base, const BitMask& base_mask,
                                   std::span<const Instance> instances,
                                   std::span<const Rect> placements, std::uint64_t seed) {
    if (base_mask.width() != base.width() || base_mask.height() != base.height())
        throw Error(ErrorKind::geometry, "base mask does not match the base image");
    AugmentedSample out{base, base_mask, {}, {}};
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (inst.mask.width() != inst.image.width() || inst.mask.height() != inst.image.height())
            throw Error(ErrorKind::geometry, "instance " + std::to_string(i) +
                                                 " mask does not match its image");
        Rect r;
        if (i < placements.size()) {
            r = placements[i];
            try {
                require_inside(r, base.width(), base.height());
            } catch (const Error& e) {
                throw e.with_context("placement " + std::to_string(i));
            }
        } else {
            r.w = std::min(inst.image.width(), base.width());
            r.h = std::min(inst.image.height(), base.height());
            r.x = std::uniform_int_distribution<int>(0, base.width() - r.w)(rng);
            r.y = std::uniform_int_distribution<int>(0, base.height() - r.h)(rng);
        }
        const RasterImage img = resize_nearest(inst.image, r.w, r.h);
        const BitMask msk = resize_nearest(inst.mask, r.w, r.h);
        for (int y = 0; y < r.h; ++y) {
            for (int x = 0; x < r.w; ++x) {
                if (!msk.at(x, y)) continue;
                out.image.set(r.x + x, r.y + y, img.at(x, y));
                out.mask.set(r.x + x, r.y + y);
            }
        }
    }
    return out;
}

} // namespace augment
