#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ausn {

inline constexpr int kMaxTotalBits = 16;
inline constexpr int kDefaultMaxTiers = 3;
// Hard storage cap: 16 total bits leaves at most 14 one-bit tiers.
inline constexpr int kMaxFieldCount = 15;

// Partition of a code word into sign / basic / subdivision-tier fields.
// The basic field selects the leading power-of-two magnitude (the
// representing range); each tier field selects a multiplicative
// refinement factor (the representing resolution).
struct BitLayout {
    int total_bits = 0;
    int b_basic = 0;
    std::vector<int> tier_bits;  // ordered widths B_1..B_n, n >= 0

    int tiers() const { return static_cast<int>(tier_bits.size()); }
    int field_count() const { return tiers() + 1; }

    // Width of field `tier` (0 = basic part).
    int field_bits(int tier) const {
        return tier == 0 ? b_basic : tier_bits[static_cast<size_t>(tier - 1)];
    }
    // Largest code storable in field `tier`: 2^width - 1.
    int max_code(int tier) const { return (1 << field_bits(tier)) - 1; }

    friend bool operator==(const BitLayout&, const BitLayout&) = default;
};

// Validates and constructs a layout. Throws std::invalid_argument when the
// fields do not sum to total_bits (exactly one sign bit), any field is
// narrower than 1 bit, total_bits exceeds 16, or more than max_tiers tiers
// are requested.
BitLayout make_layout(int total_bits, int b_basic, std::vector<int> tier_bits,
                      int max_tiers = kDefaultMaxTiers);

// The set of values selectable by one code field, index = code.
// values[0] = 0 (reserved: exact zero at tier 0, chain terminator above);
// values[k] = 2^(shift - k) for k >= 1, strictly decreasing.
struct PowerBasis {
    int tier = 0;
    int shift = 0;
    std::vector<double> values;
};

// Basis for a field of `layout`. Tier 0 takes the per-tensor scale shift;
// tiers >= 1 are unshifted. Throws std::out_of_range for a bad tier index.
PowerBasis basis(const BitLayout& layout, int tier, int shift);

// One quantized value: sign plus per-tier power magnitudes.
// k[0] = 0 encodes exact zero (sign forced positive, all fields zero);
// at tiers >= 1 a zero code terminates the superposition chain, so every
// field after the first zero is zero too. Unused slots stay zero, which
// makes default equality meaningful.
struct CodeWord {
    bool negative = false;
    std::uint8_t field_count = 0;
    std::array<std::uint16_t, kMaxFieldCount> k{};

    bool is_zero() const { return k[0] == 0; }

    friend bool operator==(const CodeWord&, const CodeWord&) = default;
};

// Checks a code against a layout's field widths and chain invariants.
// Throws std::invalid_argument on violation.
void validate_code(const CodeWord& code, const BitLayout& layout);

}  // namespace ausn
