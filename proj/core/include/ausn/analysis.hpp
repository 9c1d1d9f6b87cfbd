#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ausn/error_model.hpp"
#include "ausn/quantizer.hpp"

namespace ausn {

struct InfoBin {
    double level = 0;           // y_i (0 for the zero bin)
    double original_mass = 0;   // M(X)_i
    double quantized_mass = 0;  // M_hat(Y)_i
};

// KL divergence between the original magnitude distribution binned at
// geometric midpoints of the quantized levels and the mass the quantizer
// actually assigns to each level.
struct InfoLossReport {
    double kl = 0;
    std::optional<double> accuracy_loss;
    double total = 0;  // kl + accuracy_loss (when supplied)
    std::vector<InfoBin> bins;
};

InfoLossReport kl_information_loss(std::span<const double> original, const QuantizedTensor& qt);
InfoLossReport kl_information_loss(std::span<const double> original,
                                   std::span<const double> dequantized);

// kl + accuracy_loss, 0 when absent.
double total_information_loss(double kl, std::optional<double> accuracy_loss);

// Symmetric affine baseline: integers in [-(2^(bits-1)-1), 2^(bits-1)-1],
// scale = max|w| / (2^(bits-1)-1) unless fixed_scale is given (a fixed
// scale makes boundary clipping reachable), round to nearest.
struct UniformQuantResult {
    int bits = 0;
    double scale = 0;
    std::vector<int> codes;
    std::vector<double> dequantized;
};
UniformQuantResult baseline_uniform(std::span<const double> tensor, int bits,
                                    std::optional<double> fixed_scale = std::nullopt);

// Pure power-of-two baseline: zero-tier AUSN layout with bits - 1 basic
// bits (the single-power comparator).
QuantizedTensor baseline_power_of_two(std::span<const double> tensor, int bits,
                                      RoundingMode mode = RoundingMode::floor);

// 10 * log10(sum w^2 / sum (w - w_hat)^2); +infinity for exact
// reconstruction. Throws std::domain_error when the signal power is zero.
double sqnr_db(std::span<const double> original, std::span<const double> dequantized);

}  // namespace ausn
