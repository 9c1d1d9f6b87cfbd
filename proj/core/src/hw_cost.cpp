#include "ausn/hw_cost.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ausn {

int lut_cost(ArithScheme scheme, int a_bits, int w_bits) {
    if (a_bits < 2 || a_bits > 16 || w_bits < 2 || w_bits > 16) {
        throw std::out_of_range("lut_cost: bit widths must lie in [2, 16]");
    }
    if (scheme == ArithScheme::shift_mult) {
        // Fixed-point shift product: result width a + w, 2 LUTs per bit.
        return 2 * (a_bits + w_bits);
    }
    // Exponent addition: width max(a, w), one 4-LUT stage per 2-bit chunk.
    const int width = std::max(a_bits, w_bits);
    const int chunks = (width + 1) / 2;
    return 4 * chunks;
}

double ccr(const LayerDesc& layer) {
    const double memory = layer.bytes_per_elem * (layer.weight_elems + layer.output_elems);
    if (memory <= 0 || layer.ops <= 0) {
        throw std::domain_error("ccr: operations and memory traffic must be positive");
    }
    return layer.ops / memory;
}

double roofline_attainable(double ccr, const RooflineConfig& cfg) {
    if (ccr <= 0 || cfg.bandwidth <= 0 || cfg.peak <= 0) {
        throw std::domain_error("roofline_attainable: inputs must be positive");
    }
    return std::min(cfg.peak, ccr * cfg.bandwidth);
}

namespace {

// Published 64x64 MAC-array synthesis comparison. A/B = a-bit activations
// by b-bit weights. The decoder-variant 8/5 flip-flop figure is flagged as
// anomalous (it exceeds its neighbors tenfold in the source).
constexpr ResourceRow kReferenceRows[] = {
    {"multiplier_accumulator", 8, 8, 212388, 192293, 4.21, false},
    {"multiplier_accumulator", 8, 5, 187262, 143142, 3.75, false},
    {"multiplier_accumulator", 8, 4, 181248, 108729, 3.67, false},
    {"shift_add_decoder", 8, 8, 225280, 86317, 4.51, false},
    {"shift_add_decoder", 8, 5, 212942, 512731, 4.26, true},
    {"shift_add_decoder", 8, 4, 203712, 45729, 4.07, false},
    {"shift_add_ausn", 8, 8, 133120, 54313, 2.65, false},
    {"shift_add_ausn", 8, 5, 112071, 45127, 2.24, false},
    {"shift_add_ausn", 8, 4, 108544, 44032, 2.17, false},
};

}  // namespace

std::span<const ResourceRow> reference_table() {
    return kReferenceRows;
}

}  // namespace ausn
