#pragma once

#include <span>
#include <vector>

#include "ausn/quantizer.hpp"

namespace ausn {

// Clipping and rounding error of one quantizer configuration.
// boundary is the representable maximum R; clip_bound is the integration
// cutoff L for the analytic model (for empirical errors it records the
// largest observed |w|).
struct ErrorPair {
    double clipping = 0;   // E_b
    double rounding = 0;   // E_r
    double boundary = 0;   // R
    double clip_bound = 0; // L
};

// Sorted non-negative values reachable under (layout, power_j), 0 first.
std::vector<double> representable_set(const BitLayout& layout, int power_j);

// Errors of a quantized tensor against its source, per element:
//   E_b = (1/N) * sum_{|w| >  R} |w| * (|w| - R)
//   E_r = (1/N) * sum_{|w| <= R} |w| * ||w| - |w_hat||
// with R the representable maximum of qt's configuration. Throws
// std::invalid_argument on a size mismatch.
ErrorPair empirical_errors(std::span<const double> original, const QuantizedTensor& qt);

// Same sums against explicit dequantized values and boundary; used for
// non-AUSN quantizers in comparisons.
ErrorPair empirical_errors(std::span<const double> original,
                           std::span<const double> dequantized, double boundary);

// Expected errors for symmetric standard-normal weights clipped at
// (-clip_bound, clip_bound), computed by adaptive Simpson quadrature
// (relative tolerance 1e-6) piecewise between consecutive representable
// values and their midpoints, where the nearest-value distance is smooth.
// R >= clip_bound leaves an empty clipping interval, not an error.
ErrorPair analytic_errors(const BitLayout& layout, int power_j, double clip_bound);

// Core of the above for an explicit ascending level set (levels[0] == 0).
ErrorPair analytic_errors(std::span<const double> levels, double clip_bound);

struct SearchResult {
    BitLayout layout;
    int scale_offset = 0;  // delta in {-1, 0, +1} applied to power_j
    int power_j = 0;       // base scale exponent + scale_offset
    RoundingMode mode = RoundingMode::floor;
    ErrorPair errors;
    int candidates_evaluated = 0;
};

// Every (b_basic, [B_1..B_n]) composition of total_bits - 1 data bits with
// n <= n_max, in tie-break order (fewer tiers first, then larger b_basic).
std::vector<BitLayout> enumerate_layouts(int total_bits, int n_max);

// Exhaustive sweep over enumerate_layouts x scale offsets {-1, 0, +1},
// minimizing empirical E_b + lambda * E_r on the given data. Ties resolve
// to fewer tiers, then larger b_basic, then the offset closer to zero.
SearchResult search_layout(std::span<const double> data, int total_bits,
                           int n_max = kDefaultMaxTiers, double lambda = 1.0,
                           RoundingMode mode = RoundingMode::floor);

}  // namespace ausn
