#pragma once

#include <span>

namespace ausn {

// Arithmetic implemented per product term on the FPGA fabric:
// shift_mult shifts a fixed-point value (result width a + w), ausn_add
// adds exponents (result width max(a, w) + 1, processed in 2-bit chunks).
enum class ArithScheme { shift_mult, ausn_add };

// 6-input-LUT count for one operation; calibrated at 2 LUTs per product
// bit and 4 LUTs per 2-bit adder chunk. Bit widths must lie in [2, 16].
int lut_cost(ArithScheme scheme, int a_bits, int w_bits);

struct LayerDesc {
    double ops = 0;           // total operations (MACs x 2)
    double weight_elems = 0;
    double output_elems = 0;
    double bytes_per_elem = 4.0;
};

// Computation-to-communication ratio:
// ops / (bytes_per_elem * (weight_elems + output_elems)).
// Throws std::domain_error when the memory term is zero.
double ccr(const LayerDesc& layer);

struct RooflineConfig {
    double bandwidth = 0;  // bytes / second
    double peak = 0;       // operations / second
};

// min(peak, ccr * bandwidth).
double roofline_attainable(double ccr, const RooflineConfig& cfg);

// Published synthesis reference for a 64x64 MAC array; juxtaposed in
// reports, never recomputed. The decoder-variant 8/5 flip-flop count is
// flagged: it exceeds its neighbors tenfold in the source.
struct ResourceRow {
    const char* scheme;
    int a_bits;
    int w_bits;
    long luts;
    long flip_flops;
    double energy_watts;
    bool anomalous;
};

std::span<const ResourceRow> reference_table();

}  // namespace ausn
