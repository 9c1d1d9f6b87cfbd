#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <vector>

#include "ausn/layout.hpp"
#include "ausn/quantizer.hpp"

namespace ausn {

// A value expressed as sign * sum of 2^e over a multiset of integer
// exponents. Canonical form has pairwise distinct exponents. The zero
// value is the empty multiset with positive sign.
struct PowerPoly {
    int sign = +1;  // +1 or -1
    std::vector<int> exponents;  // kept sorted ascending

    bool is_zero() const { return exponents.empty(); }

    friend bool operator==(const PowerPoly&, const PowerPoly&) = default;
};

// Exact dyadic value: mantissa * 2^exponent with an arbitrary-precision
// mantissa carrying the sign.
struct DyadicValue {
    boost::multiprecision::cpp_int mantissa = 0;
    int exponent = 0;

    bool is_zero() const { return mantissa == 0; }
    double to_double() const;

    friend bool operator==(const DyadicValue& a, const DyadicValue& b);
};

// Exact value of a poly (duplicates allowed).
DyadicValue poly_value(const PowerPoly& poly);

// Rebuilds a poly from an exact value; the result is canonical by
// construction (one exponent per set mantissa bit).
PowerPoly poly_from_value(const DyadicValue& value);

// Merges duplicate exponents (2^n + 2^n = 2^(n+1)) until all are distinct.
// Value preserved exactly.
PowerPoly canonicalize(PowerPoly poly);

// Replaces every maximal run of consecutive exponents n..m with
// m - n + 1 >= b_sub + 2 by the single exponent m + 1, lowest run first,
// re-canonicalizing after each merge. Each merge adds exactly +2^n.
PowerPoly merge_run(PowerPoly poly, int b_sub);

// Term-count and gap budget a rounded poly must satisfy so it re-encodes
// as one code word: at most max_terms distinct exponents whose successive
// descending gaps fit the tier widths.
struct RoundingBudget {
    int max_terms = 1;
    std::vector<int> gap_bits;  // [B_1..B_n]; gap i must be <= 2^B_i - 1
    int b_sub = 0;              // sum of gap_bits

    static RoundingBudget from_layout(const BitLayout& layout);
    // n single-bit tiers: max_terms = n + 1, gap_bits = n ones, b_sub = n.
    static RoundingBudget single_bit_tiers(int n);
};

// Rounds a non-negative poly into the budget: run merging first, then
// far-below terms are dropped while the span condition m_top > n + b_sub
// holds, and remaining boundary/gap conflicts resolve to the nearer of
// {drop smallest, merge smallest pair upward}, ties dropping. The result
// value stays within [2^M, 2^(M+1)] for an input in that binade.
PowerPoly compress(PowerPoly poly, const RoundingBudget& budget);

// Cross-product multiset {e_a + e_b}; sign = product of signs. Exact.
PowerPoly multiply(const PowerPoly& a, const PowerPoly& b);

// Flat power-term expansion of a code: a t-tier code becomes t + 1
// distinct exponents (partial sums of Eq-style nested products).
PowerPoly code_to_poly(const CodeWord& code, const BitLayout& layout, int power_j);

enum class DotMode { exact, rounded };

struct DotProductResult {
    CodeWord code;
    BitLayout out_layout;
    int power_j = 0;            // scale exponent of the output code
    DyadicValue exact;          // exact accumulated value
    double quantized_value = 0; // reconstruct(code)
    bool accumulator_overflow = false;
};

// Inner product of two quantized rows. Products are accumulated exactly
// as signed power terms (dyadic arithmetic, no intermediate rounding).
// exact mode re-quantizes the exact value through the quantizer; rounded
// mode compresses the magnitude's canonical poly to out_layout's budget
// and re-encodes the surviving exponents directly. accumulator_bits > 0
// flags (not errors) results whose exact fixed-point sum would need more
// than that many magnitude bits. Throws std::invalid_argument on length
// mismatch.
DotProductResult dot_product(std::span<const CodeWord> weights, const BitLayout& w_layout,
                             int w_power, std::span<const CodeWord> activations,
                             const BitLayout& a_layout, int a_power,
                             const BitLayout& out_layout, DotMode mode,
                             int accumulator_bits = 0);

DotProductResult dot_product(const QuantizedTensor& weights, const QuantizedTensor& activations,
                             const BitLayout& out_layout, DotMode mode,
                             int accumulator_bits = 0);

}  // namespace ausn
