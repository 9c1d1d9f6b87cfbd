#include "ausn/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ausn {

BitLayout make_layout(int total_bits, int b_basic, std::vector<int> tier_bits,
                      int max_tiers) {
    if (total_bits < 2 || total_bits > kMaxTotalBits) {
        throw std::invalid_argument("layout: total_bits must be in [2, " +
                                    std::to_string(kMaxTotalBits) + "], got " +
                                    std::to_string(total_bits));
    }
    if (b_basic < 1) {
        throw std::invalid_argument("layout: basic part needs at least 1 bit");
    }
    for (int b : tier_bits) {
        if (b < 1) {
            throw std::invalid_argument("layout: every tier needs at least 1 bit");
        }
    }
    if (static_cast<int>(tier_bits.size()) > max_tiers ||
        static_cast<int>(tier_bits.size()) > kMaxFieldCount - 1) {
        throw std::invalid_argument("layout: " + std::to_string(tier_bits.size()) +
                                    " tiers exceed the configured maximum of " +
                                    std::to_string(std::min(max_tiers, kMaxFieldCount - 1)));
    }
    const int data_bits = b_basic + std::accumulate(tier_bits.begin(), tier_bits.end(), 0);
    if (1 + data_bits != total_bits) {
        throw std::invalid_argument(
            "layout: sign + fields = " + std::to_string(1 + data_bits) +
            " bits, expected total_bits = " + std::to_string(total_bits));
    }
    BitLayout layout;
    layout.total_bits = total_bits;
    layout.b_basic = b_basic;
    layout.tier_bits = std::move(tier_bits);
    return layout;
}

PowerBasis basis(const BitLayout& layout, int tier, int shift) {
    if (tier < 0 || tier > layout.tiers()) {
        throw std::out_of_range("basis: tier " + std::to_string(tier) +
                                " out of range for a layout with " +
                                std::to_string(layout.tiers()) + " tiers");
    }
    PowerBasis b;
    b.tier = tier;
    b.shift = shift;
    const int count = 1 << layout.field_bits(tier);
    b.values.resize(static_cast<size_t>(count));
    b.values[0] = 0.0;  // reserved code
    for (int k = 1; k < count; ++k) {
        b.values[static_cast<size_t>(k)] = std::ldexp(1.0, shift - k);
    }
    return b;
}

void validate_code(const CodeWord& code, const BitLayout& layout) {
    if (code.field_count != layout.field_count()) {
        throw std::invalid_argument("code: field count mismatch with layout");
    }
    for (int i = 0; i < layout.field_count(); ++i) {
        if (code.k[static_cast<size_t>(i)] > layout.max_code(i)) {
            throw std::invalid_argument("code: field " + std::to_string(i) +
                                        " exceeds its width");
        }
    }
    for (int i = layout.field_count(); i < kMaxFieldCount; ++i) {
        if (code.k[static_cast<size_t>(i)] != 0) {
            throw std::invalid_argument("code: unused field slots must stay zero");
        }
    }
    if (code.k[0] == 0) {
        if (code.negative) {
            throw std::invalid_argument("code: zero must be positive");
        }
        for (int i = 1; i < layout.field_count(); ++i) {
            if (code.k[static_cast<size_t>(i)] != 0) {
                throw std::invalid_argument("code: zero must have all-zero fields");
            }
        }
    }
    // The superposition chain ends at the first zero subdivision code.
    bool terminated = false;
    for (int i = 1; i < layout.field_count(); ++i) {
        if (terminated && code.k[static_cast<size_t>(i)] != 0) {
            throw std::invalid_argument("code: nonzero field after chain terminator");
        }
        if (code.k[static_cast<size_t>(i)] == 0) {
            terminated = true;
        }
    }
}

}  // namespace ausn
