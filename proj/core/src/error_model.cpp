#include "ausn/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ausn {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

double normal_pdf(double w) { return kInvSqrt2Pi * std::exp(-0.5 * w * w); }

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Adaptive Simpson to a relative tolerance of 1e-6 (absolute floor 1e-18).
double integrate(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, a, b);
    const double tol = std::max(1e-6 * std::fabs(whole), 1e-18);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Representable maximum: the fully saturated code (every field at 1).
double representable_max(const BitLayout& layout, int power_j) {
    CodeWord top;
    top.field_count = static_cast<std::uint8_t>(layout.field_count());
    for (int i = 0; i < layout.field_count(); ++i) top.k[static_cast<size_t>(i)] = 1;
    return reconstruct(top, layout, power_j);
}

}  // namespace

std::vector<double> representable_set(const BitLayout& layout, int power_j) {
    return representable_magnitudes(layout, power_j);
}

ErrorPair empirical_errors(std::span<const double> original,
                           std::span<const double> dequantized, double boundary) {
    if (original.size() != dequantized.size()) {
        throw std::invalid_argument("empirical_errors: size mismatch");
    }
    if (original.empty()) {
        throw std::invalid_argument("empirical_errors: empty tensor");
    }
    ErrorPair errors;
    errors.boundary = boundary;
    double clip_sum = 0, round_sum = 0, max_abs = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double a = std::fabs(original[i]);
        max_abs = std::max(max_abs, a);
        if (a > boundary) {
            clip_sum += a * (a - boundary);
        } else {
            round_sum += a * std::fabs(a - std::fabs(dequantized[i]));
        }
    }
    const double n = static_cast<double>(original.size());
    errors.clipping = clip_sum / n;
    errors.rounding = round_sum / n;
    errors.clip_bound = max_abs;
    return errors;
}

ErrorPair empirical_errors(std::span<const double> original, const QuantizedTensor& qt) {
    if (original.size() != qt.size()) {
        throw std::invalid_argument("empirical_errors: tensor and codes disagree");
    }
    const std::vector<double> dequant = dequantize_tensor(qt);
    return empirical_errors(original, dequant, representable_max(qt.layout, qt.power_j));
}

ErrorPair analytic_errors(std::span<const double> levels, double clip_bound) {
    if (levels.size() < 2) {
        throw std::invalid_argument("analytic_errors: need at least two levels");
    }
    if (clip_bound <= 0) {
        throw std::invalid_argument("analytic_errors: clip bound must be positive");
    }
    ErrorPair errors;
    const double boundary = levels.back();
    errors.boundary = boundary;
    errors.clip_bound = clip_bound;

    // Magnitudes of symmetric standard-normal weights carry density
    // 2*phi(w) on w > 0; the factor keeps these expectations comparable
    // with per-element empirical averages over signed tensors.
    if (boundary < clip_bound) {
        errors.clipping = 2.0 * integrate(
            [boundary](double w) { return w * (w - boundary) * normal_pdf(w); },
            boundary, clip_bound);
    }

    const double upper = std::min(boundary, clip_bound);
    double rounding = 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const double lo = levels[i];
        const double hi = levels[i + 1];
        if (lo >= upper) break;
        // The nearest-level distance switches at the midpoint; integrate
        // each smooth half separately.
        const double mid = 0.5 * (lo + hi);
        rounding += integrate(
            [lo](double w) { return w * (w - lo) * normal_pdf(w); },
            lo, std::min(mid, upper));
        if (upper > mid) {
            rounding += integrate(
                [hi](double w) { return w * (hi - w) * normal_pdf(w); },
                mid, std::min(hi, upper));
        }
    }
    errors.rounding = 2.0 * rounding;
    return errors;
}

ErrorPair analytic_errors(const BitLayout& layout, int power_j, double clip_bound) {
    const std::vector<double> levels = representable_magnitudes(layout, power_j);
    return analytic_errors(levels, clip_bound);
}

std::vector<BitLayout> enumerate_layouts(int total_bits, int n_max) {
    const int data_bits = total_bits - 1;
    std::vector<BitLayout> layouts;
    std::vector<int> tiers;
    // Tie-break order: fewer tiers first, then larger basic part.
    for (int n = 0; n <= n_max; ++n) {
        if (n + 1 > data_bits) break;  // every field needs a bit
        for (int b_basic = data_bits - n; b_basic >= 1; --b_basic) {
            const int sub_bits = data_bits - b_basic;
            if ((n == 0) != (sub_bits == 0)) continue;
            std::function<void(int, int)> emit = [&](int remaining, int slots) {
                if (slots == 0) {
                    if (remaining == 0) {
                        layouts.push_back(make_layout(total_bits, b_basic, tiers, n_max));
                    }
                    return;
                }
                for (int b = 1; b <= remaining - (slots - 1); ++b) {
                    tiers.push_back(b);
                    emit(remaining - b, slots - 1);
                    tiers.pop_back();
                }
            };
            emit(sub_bits, n);
        }
    }
    return layouts;
}

SearchResult search_layout(std::span<const double> data, int total_bits, int n_max,
                           double lambda, RoundingMode mode) {
    if (total_bits < 3) {
        throw std::invalid_argument("search_layout: need at least 3 total bits");
    }
    if (data.empty()) {
        throw std::invalid_argument("search_layout: empty tensor");
    }
    int base_power = 0;
    try {
        base_power = scale_exponent(data);
    } catch (const std::domain_error&) {
        base_power = 0;
    }

    const std::vector<BitLayout> layouts = enumerate_layouts(total_bits, n_max);
    constexpr int kOffsets[] = {0, -1, +1};  // tie order: |delta| ascending

    SearchResult best;
    double best_objective = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (const BitLayout& layout : layouts) {
        for (int delta : kOffsets) {
            const int power_j = base_power + delta;
            const QuantizedTensor qt = quantize_tensor(
                data, {data.size()}, layout, mode, power_j);
            const ErrorPair errors = empirical_errors(data, qt);
            ++evaluated;
            const double objective = errors.clipping + lambda * errors.rounding;
            if (objective < best_objective) {
                best_objective = objective;
                best.layout = layout;
                best.scale_offset = delta;
                best.power_j = power_j;
                best.errors = errors;
            }
        }
    }
    best.mode = mode;
    best.candidates_evaluated = evaluated;
    return best;
}

}  // namespace ausn
