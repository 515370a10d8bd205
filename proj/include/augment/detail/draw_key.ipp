// Copyright 2026 The augment Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>

namespace augment {

template <class Rng>
CombinationKey draw_key(const ChoiceSpace& space, Rng& rng) {
    CombinationKey key;
    for (;;) {
        key.region_bits = 0;
        key.choices.clear();
        for (std::size_t n = 0; n < space.regions(); ++n) {
            const auto& allowed = space.allowed(n);
            std::uniform_int_distribution<std::size_t> digit(0, allowed.size());
            const std::size_t d = digit(rng);
            if (d == 0) continue;
            key.region_bits |= std::uint64_t{1} << n;
            key.choices.push_back(allowed[d - 1]);
        }
        if (key.region_bits != 0) return key;
    }
}

} // namespace augment
