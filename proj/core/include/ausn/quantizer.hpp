#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ausn/layout.hpp"

namespace ausn {

enum class RoundingMode { floor, nearest };

// Per-tensor scale exponent: ceil(log2 max|w|), computed exactly from the
// binary exponent (no floating log). Throws std::domain_error for an
// all-zero tensor and std::invalid_argument for empty or non-finite input.
int scale_exponent(std::span<const double> tensor);

// Shifts a tier-0 basis by the tensor scale exponent: every nonzero entry
// is multiplied by 2^power_j.
PowerBasis preconvert(const PowerBasis& tier0, int power_j);

// Range bracket the shifted basis must satisfy for the tensor it scales:
// max(basis) <= max|W| <= 2 * max(basis).
bool range_bracket_holds(int power_j, double max_abs);

// Value denoted by a code: sign * sum_{i=0..t} prod_{j<=i} v_j with
// v_0 = 2^(power_j - k_0), v_j = 2^(-k_j), t the last tier before a zero
// code. Zero code yields 0.
double reconstruct(const CodeWord& code, const BitLayout& layout, int power_j);

// Greedy per-tier quantization of one value. Floor mode selects, per tier,
// the largest basis value <= the running remainder (saturating at the tier
// maximum when the remainder exceeds it, which clips |w| above the
// representable range to the range maximum). Nearest mode additionally
// considers the next representable value above the floor result and keeps
// the closer one, ties to floor. Throws std::invalid_argument on NaN/inf.
CodeWord quantize_value(double w, const BitLayout& layout, int power_j,
                        RoundingMode mode = RoundingMode::floor);

// All distinct non-negative magnitudes reachable under (layout, power_j),
// sorted ascending, starting with 0. Brute-force enumeration over code
// words; size <= 2^(total_bits - 1).
std::vector<double> representable_magnitudes(const BitLayout& layout, int power_j);

struct TensorStats {
    std::size_t count = 0;
    double min = 0;
    double max = 0;
    double std_dev = 0;
};

struct QuantizedTensor {
    BitLayout layout;
    int power_j = 0;
    RoundingMode mode = RoundingMode::floor;
    std::vector<std::size_t> shape;
    std::vector<CodeWord> codes;  // row-major
    std::optional<TensorStats> origin_stats;

    std::size_t size() const { return codes.size(); }
};

// Quantizes every element independently. power_j defaults to
// scale_exponent(data); an all-zero tensor yields all-zero codes with
// power_j = 0. The explicit override exists for fixed-configuration
// evaluation (e.g. the layout search).
QuantizedTensor quantize_tensor(std::span<const double> data, std::vector<std::size_t> shape,
                                const BitLayout& layout,
                                RoundingMode mode = RoundingMode::floor,
                                std::optional<int> power_j = std::nullopt);

// 1-D convenience.
QuantizedTensor quantize_tensor(std::span<const double> data, const BitLayout& layout,
                                RoundingMode mode = RoundingMode::floor,
                                std::optional<int> power_j = std::nullopt);

std::vector<double> dequantize_tensor(const QuantizedTensor& qt);

namespace detail {
// Floor-mode greedy on |w|; shared by quantize_value and the tensor path.
CodeWord quantize_magnitude_floor(double magnitude, const BitLayout& layout, int power_j);
// Nearest-mode step given the precomputed ascending level set.
CodeWord quantize_with_levels(double w, const BitLayout& layout, int power_j,
                              RoundingMode mode, std::span<const double> levels);
}  // namespace detail

}  // namespace ausn
