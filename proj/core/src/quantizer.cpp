#include "ausn/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ausn {

namespace {

double reconstruct_unchecked(const CodeWord& code, const BitLayout& layout, int power_j) {
    if (code.k[0] == 0) return 0.0;
    int exponent = power_j - code.k[0];
    double sum = std::ldexp(1.0, exponent);
    for (int tier = 1; tier <= layout.tiers(); ++tier) {
        const int k = code.k[static_cast<size_t>(tier)];
        if (k == 0) break;
        exponent -= k;
        sum += std::ldexp(1.0, exponent);
    }
    return code.negative ? -sum : sum;
}

TensorStats compute_stats(std::span<const double> data) {
    TensorStats stats;
    stats.count = data.size();
    stats.min = data.front();
    stats.max = data.front();
    double sum = 0, sum_sq = 0;
    for (double w : data) {
        stats.min = std::min(stats.min, w);
        stats.max = std::max(stats.max, w);
        sum += w;
        sum_sq += w * w;
    }
    const double mean = sum / static_cast<double>(data.size());
    const double var = std::max(0.0, sum_sq / static_cast<double>(data.size()) - mean * mean);
    stats.std_dev = std::sqrt(var);
    return stats;
}

}  // namespace

int scale_exponent(std::span<const double> tensor) {
    if (tensor.empty()) {
        throw std::invalid_argument("scale_exponent: empty tensor");
    }
    double max_abs = 0.0;
    for (double w : tensor) {
        if (!std::isfinite(w)) {
            throw std::invalid_argument("scale_exponent: non-finite element");
        }
        max_abs = std::max(max_abs, std::fabs(w));
    }
    if (max_abs == 0.0) {
        throw std::domain_error("scale_exponent: all-zero tensor");
    }
    // max_abs = m * 2^e with m in [0.5, 1): ceil(log2 max_abs) is e, except
    // for exact powers of two (m == 0.5) where it is e - 1.
    int e = 0;
    const double m = std::frexp(max_abs, &e);
    return m == 0.5 ? e - 1 : e;
}

PowerBasis preconvert(const PowerBasis& tier0, int power_j) {
    if (tier0.tier != 0) {
        throw std::invalid_argument("preconvert applies to the tier-0 basis");
    }
    PowerBasis shifted = tier0;
    shifted.shift = tier0.shift + power_j;
    for (double& v : shifted.values) {
        v = std::ldexp(v, power_j);
    }
    return shifted;
}

bool range_bracket_holds(int power_j, double max_abs) {
    const double basis_max = std::ldexp(1.0, power_j - 1);
    return basis_max <= max_abs && max_abs <= 2.0 * basis_max;
}

double reconstruct(const CodeWord& code, const BitLayout& layout, int power_j) {
    validate_code(code, layout);
    return reconstruct_unchecked(code, layout, power_j);
}

namespace detail {

CodeWord quantize_magnitude_floor(double magnitude, const BitLayout& layout, int power_j) {
    CodeWord code;
    code.field_count = static_cast<std::uint8_t>(layout.field_count());
    if (magnitude == 0.0) return code;

    // Tier 0: largest 2^(power_j - k) <= magnitude. ilogb gives the exact
    // binary exponent, so k comes out without floating log arithmetic.
    int k0 = power_j - std::ilogb(magnitude);
    if (k0 < 1) k0 = 1;  // at or above the range maximum: saturate
    if (k0 > layout.max_code(0)) return code;  // below the smallest level: floor to zero
    code.k[0] = static_cast<std::uint16_t>(k0);

    // Remainder update m/v - 1 stays exact: the division is a power-of-two
    // scaling and the in-range subtraction is Sterbenz-exact.
    double rem = std::ldexp(magnitude, k0 - power_j) - 1.0;
    for (int tier = 1; tier <= layout.tiers() && rem > 0.0; ++tier) {
        int k = -std::ilogb(rem);
        if (k < 1) k = 1;  // remainder above the tier maximum: saturate
        if (k > layout.max_code(tier)) break;  // below the tier floor: chain stops
        code.k[static_cast<size_t>(tier)] = static_cast<std::uint16_t>(k);
        rem = std::ldexp(rem, k) - 1.0;
    }
    return code;
}

CodeWord quantize_with_levels(double w, const BitLayout& layout, int power_j,
                              RoundingMode mode, std::span<const double> levels) {
    const double magnitude = std::fabs(w);
    CodeWord code = quantize_magnitude_floor(magnitude, layout, power_j);
    if (mode == RoundingMode::nearest) {
        const double floor_value = reconstruct_unchecked(code, layout, power_j);
        auto above = std::upper_bound(levels.begin(), levels.end(), floor_value);
        if (above != levels.end() && *above - magnitude < magnitude - floor_value) {
            code = quantize_magnitude_floor(*above, layout, power_j);
        }
    }
    if (w < 0.0 && !code.is_zero()) {
        code.negative = true;
    }
    return code;
}

}  // namespace detail

CodeWord quantize_value(double w, const BitLayout& layout, int power_j, RoundingMode mode) {
    if (!std::isfinite(w)) {
        throw std::invalid_argument("quantize_value: non-finite input");
    }
    if (mode == RoundingMode::floor) {
        CodeWord code = detail::quantize_magnitude_floor(std::fabs(w), layout, power_j);
        if (w < 0.0 && !code.is_zero()) code.negative = true;
        return code;
    }
    const std::vector<double> levels = representable_magnitudes(layout, power_j);
    return detail::quantize_with_levels(w, layout, power_j, mode, levels);
}

std::vector<double> representable_magnitudes(const BitLayout& layout, int power_j) {
    std::vector<double> out;
    out.reserve(std::size_t{1} << (layout.total_bits - 1));
    out.push_back(0.0);
    // Depth-first over nonzero codes; each recursion level may terminate
    // the chain (zero code) or extend it with every nonzero tier code.
    std::function<void(int, int, double)> visit = [&](int tier, int exponent, double sum) {
        out.push_back(sum);
        if (tier > layout.tiers()) return;
        for (int k = 1; k <= layout.max_code(tier); ++k) {
            const int e = exponent - k;
            visit(tier + 1, e, sum + std::ldexp(1.0, e));
        }
    };
    for (int k0 = 1; k0 <= layout.max_code(0); ++k0) {
        const int e = power_j - k0;
        visit(1, e, std::ldexp(1.0, e));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

QuantizedTensor quantize_tensor(std::span<const double> data, std::vector<std::size_t> shape,
                                const BitLayout& layout, RoundingMode mode,
                                std::optional<int> power_j) {
    std::size_t expected = 1;
    for (std::size_t d : shape) expected *= d;
    if (shape.empty() || expected != data.size()) {
        throw std::invalid_argument("quantize_tensor: shape does not match element count");
    }
    if (data.empty()) {
        throw std::invalid_argument("quantize_tensor: empty tensor");
    }

    QuantizedTensor qt;
    qt.layout = layout;
    qt.mode = mode;
    qt.shape = std::move(shape);
    qt.origin_stats = compute_stats(data);

    if (power_j.has_value()) {
        qt.power_j = *power_j;
        for (double w : data) {
            if (!std::isfinite(w)) {
                throw std::invalid_argument("quantize_tensor: non-finite element");
            }
        }
    } else {
        try {
            qt.power_j = scale_exponent(data);
            const double max_abs =
                std::max(std::fabs(qt.origin_stats->min), std::fabs(qt.origin_stats->max));
            if (!range_bracket_holds(qt.power_j, max_abs)) {
                throw std::logic_error("quantize_tensor: scale bracket violated");
            }
        } catch (const std::domain_error&) {
            qt.power_j = 0;  // all-zero tensor: all-zero codes
        }
    }

    qt.codes.resize(data.size());
    if (mode == RoundingMode::nearest) {
        const std::vector<double> levels = representable_magnitudes(layout, qt.power_j);
        for (std::size_t i = 0; i < data.size(); ++i) {
            qt.codes[i] = detail::quantize_with_levels(data[i], layout, qt.power_j, mode, levels);
        }
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) {
            CodeWord code = detail::quantize_magnitude_floor(std::fabs(data[i]), layout, qt.power_j);
            if (data[i] < 0.0 && !code.is_zero()) code.negative = true;
            qt.codes[i] = code;
        }
    }
    return qt;
}

QuantizedTensor quantize_tensor(std::span<const double> data, const BitLayout& layout,
                                RoundingMode mode, std::optional<int> power_j) {
    return quantize_tensor(data, std::vector<std::size_t>{data.size()}, layout, mode, power_j);
}

std::vector<double> dequantize_tensor(const QuantizedTensor& qt) {
    std::vector<double> out(qt.codes.size());
    for (std::size_t i = 0; i < qt.codes.size(); ++i) {
        out[i] = reconstruct_unchecked(qt.codes[i], qt.layout, qt.power_j);
    }
    return out;
}

}  // namespace ausn
