#include "ausn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ausn {

namespace {

constexpr double kMassSmoothing = 1e-12;

}  // namespace

InfoLossReport kl_information_loss(std::span<const double> original,
                                   std::span<const double> dequantized) {
    if (original.empty() || original.size() != dequantized.size()) {
        throw std::invalid_argument("kl_information_loss: size mismatch");
    }
    const double n = static_cast<double>(original.size());

    // Distinct positive quantized magnitudes are the levels; zero is its
    // own bin holding exact zeros on both sides.
    std::vector<double> levels;
    levels.reserve(dequantized.size());
    for (double v : dequantized) {
        const double m = std::fabs(v);
        if (m > 0) levels.push_back(m);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    InfoLossReport report;
    report.bins.resize(levels.size() + 1);
    report.bins[0].level = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        report.bins[i + 1].level = levels[i];
    }

    // Bin edges at geometric midpoints sqrt(y_i * y_{i+1}); the outermost
    // bins run down to zero and up past max|w|.
    std::vector<double> edges(levels.size() > 1 ? levels.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        edges[i] = std::sqrt(levels[i] * levels[i + 1]);
    }

    for (std::size_t i = 0; i < original.size(); ++i) {
        const double orig = std::fabs(original[i]);
        std::size_t bin = 0;
        if (orig > 0 && !levels.empty()) {
            bin = 1 + static_cast<std::size_t>(
                          std::upper_bound(edges.begin(), edges.end(), orig) - edges.begin());
        }
        report.bins[bin].original_mass += 1.0;

        const double quant = std::fabs(dequantized[i]);
        std::size_t qbin = 0;
        if (quant > 0) {
            qbin = 1 + static_cast<std::size_t>(
                           std::lower_bound(levels.begin(), levels.end(), quant) -
                           levels.begin());
        }
        report.bins[qbin].quantized_mass += 1.0;
    }

    double kl = 0.0;
    for (InfoBin& bin : report.bins) {
        bin.original_mass /= n;
        bin.quantized_mass /= n;
        if (bin.original_mass > 0) {
            kl += bin.original_mass *
                  std::log(bin.original_mass / (bin.quantized_mass + kMassSmoothing));
        }
    }
    report.kl = std::max(0.0, kl);
    report.total = report.kl;
    return report;
}

InfoLossReport kl_information_loss(std::span<const double> original, const QuantizedTensor& qt) {
    const std::vector<double> dequant = dequantize_tensor(qt);
    return kl_information_loss(original, dequant);
}

double total_information_loss(double kl, std::optional<double> accuracy_loss) {
    if (kl < 0) {
        throw std::invalid_argument("total_information_loss: kl must be non-negative");
    }
    return kl + accuracy_loss.value_or(0.0);
}

UniformQuantResult baseline_uniform(std::span<const double> tensor, int bits,
                                    std::optional<double> fixed_scale) {
    if (bits < 2) {
        throw std::invalid_argument("baseline_uniform: need at least 2 bits");
    }
    if (tensor.empty()) {
        throw std::invalid_argument("baseline_uniform: empty tensor");
    }
    const int q_max = (1 << (bits - 1)) - 1;
    UniformQuantResult result;
    result.bits = bits;

    double max_abs = 0;
    for (double w : tensor) max_abs = std::max(max_abs, std::fabs(w));

    result.scale = fixed_scale.value_or(max_abs / static_cast<double>(q_max));
    result.codes.resize(tensor.size());
    result.dequantized.resize(tensor.size());
    if (result.scale == 0) {  // all-zero tensor
        return result;
    }
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        const double q = std::round(tensor[i] / result.scale);
        const int clipped = static_cast<int>(std::clamp<double>(q, -q_max, q_max));
        result.codes[i] = clipped;
        result.dequantized[i] = clipped * result.scale;
    }
    return result;
}

QuantizedTensor baseline_power_of_two(std::span<const double> tensor, int bits,
                                      RoundingMode mode) {
    if (bits < 2) {
        throw std::invalid_argument("baseline_power_of_two: need at least 2 bits");
    }
    const BitLayout layout = make_layout(bits, bits - 1, {});
    return quantize_tensor(tensor, {tensor.size()}, layout, mode);
}

double sqnr_db(std::span<const double> original, std::span<const double> dequantized) {
    if (original.size() != dequantized.size() || original.empty()) {
        throw std::invalid_argument("sqnr_db: size mismatch");
    }
    double signal = 0, noise = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        signal += original[i] * original[i];
        const double err = original[i] - dequantized[i];
        noise += err * err;
    }
    if (signal == 0) {
        throw std::domain_error("sqnr_db: zero signal power");
    }
    if (noise == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(signal / noise);
}

}  // namespace ausn
