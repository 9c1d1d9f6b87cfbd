#include "ausn/power_poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ausn {

namespace mp = boost::multiprecision;

double DyadicValue::to_double() const {
    return std::ldexp(mantissa.convert_to<double>(), exponent);
}

bool operator==(const DyadicValue& a, const DyadicValue& b) {
    if (a.mantissa == 0 || b.mantissa == 0) return a.mantissa == b.mantissa;
    // Compare after stripping trailing zero bits.
    auto normalized = [](const DyadicValue& v) {
        const unsigned tz = mp::lsb(mp::cpp_int(abs(v.mantissa)));
        return std::pair<mp::cpp_int, int>(v.mantissa >> tz,
                                           v.exponent + static_cast<int>(tz));
    };
    return normalized(a) == normalized(b);
}

DyadicValue poly_value(const PowerPoly& poly) {
    DyadicValue value;
    if (poly.exponents.empty()) return value;
    const int lsb_exp = *std::min_element(poly.exponents.begin(), poly.exponents.end());
    for (int e : poly.exponents) {
        value.mantissa += mp::cpp_int(1) << (e - lsb_exp);
    }
    if (poly.sign < 0) value.mantissa = -value.mantissa;
    value.exponent = lsb_exp;
    return value;
}

PowerPoly poly_from_value(const DyadicValue& value) {
    PowerPoly poly;
    if (value.mantissa == 0) return poly;
    poly.sign = value.mantissa < 0 ? -1 : +1;
    const mp::cpp_int magnitude = abs(value.mantissa);
    const unsigned top = mp::msb(magnitude);
    for (unsigned bit = 0; bit <= top; ++bit) {
        if (mp::bit_test(magnitude, bit)) {
            poly.exponents.push_back(value.exponent + static_cast<int>(bit));
        }
    }
    return poly;
}

PowerPoly canonicalize(PowerPoly poly) {
    if (poly.exponents.empty()) return poly;
    // Binary carry: 2^n + 2^n = 2^(n+1) until multiplicities are all one.
    std::map<int, long long> mult;
    for (int e : poly.exponents) ++mult[e];
    for (auto it = mult.begin(); it != mult.end(); ++it) {
        if (it->second >= 2) {
            mult[it->first + 1] += it->second / 2;
            it->second %= 2;
        }
    }
    poly.exponents.clear();
    for (const auto& [e, count] : mult) {
        if (count == 1) poly.exponents.push_back(e);
    }
    return poly;
}

PowerPoly merge_run(PowerPoly poly, int b_sub) {
    const int min_run = b_sub + 2;
    for (;;) {
        // Lowest maximal run of consecutive exponents long enough to merge.
        std::size_t run_start = 0;
        bool found = false;
        std::size_t i = 0;
        while (i < poly.exponents.size()) {
            std::size_t j = i;
            while (j + 1 < poly.exponents.size() &&
                   poly.exponents[j + 1] == poly.exponents[j] + 1) {
                ++j;
            }
            if (static_cast<int>(j - i + 1) >= min_run) {
                run_start = i;
                found = true;
                break;
            }
            i = j + 1;
        }
        if (!found) return poly;
        std::size_t run_end = run_start;
        while (run_end + 1 < poly.exponents.size() &&
               poly.exponents[run_end + 1] == poly.exponents[run_end] + 1) {
            ++run_end;
        }
        // 2^n + ... + 2^m = 2^(m+1) - 2^n, so the merge adds exactly +2^n.
        const int merged = poly.exponents[run_end] + 1;
        poly.exponents.erase(poly.exponents.begin() + static_cast<std::ptrdiff_t>(run_start),
                             poly.exponents.begin() + static_cast<std::ptrdiff_t>(run_end) + 1);
        poly.exponents.push_back(merged);
        std::sort(poly.exponents.begin(), poly.exponents.end());
        poly = canonicalize(std::move(poly));
    }
}

RoundingBudget RoundingBudget::from_layout(const BitLayout& layout) {
    RoundingBudget budget;
    budget.max_terms = layout.tiers() + 1;
    budget.gap_bits = layout.tier_bits;
    budget.b_sub = 0;
    for (int b : budget.gap_bits) budget.b_sub += b;
    return budget;
}

RoundingBudget RoundingBudget::single_bit_tiers(int n) {
    RoundingBudget budget;
    budget.max_terms = n + 1;
    budget.gap_bits.assign(static_cast<std::size_t>(n), 1);
    budget.b_sub = n;
    return budget;
}

namespace {

// Index of the first violated descending gap, or -1. Exponents ascending;
// gap i (descending order) must fit gap_bits[i - 1].
int violated_gap(const std::vector<int>& exponents, const std::vector<int>& gap_bits) {
    const std::size_t terms = exponents.size();
    for (std::size_t i = 1; i < terms; ++i) {
        const int gap = exponents[terms - i] - exponents[terms - i - 1];
        if (i - 1 >= gap_bits.size()) return static_cast<int>(i);
        if (gap > (1 << gap_bits[i - 1]) - 1) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

PowerPoly compress(PowerPoly poly, const RoundingBudget& budget) {
    if (poly.sign < 0) {
        throw std::invalid_argument("compress: value must be non-negative");
    }
    if (poly.exponents.empty()) return poly;

    poly = canonicalize(std::move(poly));
    poly = merge_run(std::move(poly), budget.b_sub);

    for (;;) {
        const int terms = static_cast<int>(poly.exponents.size());
        const bool too_many = terms > budget.max_terms;
        const bool bad_gap = violated_gap(poly.exponents, budget.gap_bits) >= 0;
        if (!too_many && !bad_gap) return poly;

        const int low = poly.exponents.front();
        const int top = poly.exponents.back();
        if (too_many && top > low + budget.b_sub) {
            // Far-below term: drop it (error -2^low).
            poly.exponents.erase(poly.exponents.begin());
            continue;
        }
        // Boundary / gap conflict: round to the nearest of {drop smallest,
        // merge smallest pair upward}; ties drop. In units of 2^low the
        // drop error is 1 and the merge error 2^(next-low) - 1.
        const int next = poly.exponents[1];
        const mp::cpp_int drop_error = 1;
        const mp::cpp_int merge_error = (mp::cpp_int(1) << (next - low)) - 1;
        if (merge_error < drop_error) {
            PowerPoly merged = poly;
            merged.exponents.erase(merged.exponents.begin(), merged.exponents.begin() + 2);
            merged.exponents.push_back(next + 1);
            std::sort(merged.exponents.begin(), merged.exponents.end());
            poly = canonicalize(std::move(merged));
        } else {
            poly.exponents.erase(poly.exponents.begin());
        }
    }
}

PowerPoly multiply(const PowerPoly& a, const PowerPoly& b) {
    PowerPoly product;
    if (a.is_zero() || b.is_zero()) return product;
    product.sign = a.sign * b.sign;
    product.exponents.reserve(a.exponents.size() * b.exponents.size());
    for (int ea : a.exponents) {
        for (int eb : b.exponents) {
            product.exponents.push_back(ea + eb);
        }
    }
    std::sort(product.exponents.begin(), product.exponents.end());
    return product;
}

PowerPoly code_to_poly(const CodeWord& code, const BitLayout& layout, int power_j) {
    validate_code(code, layout);
    PowerPoly poly;
    if (code.is_zero()) return poly;
    poly.sign = code.negative ? -1 : +1;
    int exponent = power_j - code.k[0];
    poly.exponents.push_back(exponent);
    for (int tier = 1; tier <= layout.tiers(); ++tier) {
        const int k = code.k[static_cast<size_t>(tier)];
        if (k == 0) break;
        exponent -= k;
        poly.exponents.push_back(exponent);
    }
    std::sort(poly.exponents.begin(), poly.exponents.end());
    return poly;
}

namespace {

// Re-encode a compressed poly: descending exponents e_0 > ... > e_t map to
// k_0 = 1 under power_j = e_0 + 1 and k_i = e_{i-1} - e_i.
CodeWord encode_compressed(const PowerPoly& poly, const BitLayout& layout, int& power_j) {
    CodeWord code;
    code.field_count = static_cast<std::uint8_t>(layout.field_count());
    if (poly.is_zero()) {
        power_j = 0;
        return code;
    }
    power_j = poly.exponents.back() + 1;
    code.negative = poly.sign < 0;
    code.k[0] = 1;
    int tier = 1;
    for (std::size_t i = poly.exponents.size() - 1; i-- > 0; ++tier) {
        code.k[static_cast<size_t>(tier)] = static_cast<std::uint16_t>(
            poly.exponents[i + 1] - poly.exponents[i]);
    }
    return code;
}

}  // namespace

DotProductResult dot_product(std::span<const CodeWord> weights, const BitLayout& w_layout,
                             int w_power, std::span<const CodeWord> activations,
                             const BitLayout& a_layout, int a_power,
                             const BitLayout& out_layout, DotMode mode,
                             int accumulator_bits) {
    if (weights.size() != activations.size()) {
        throw std::invalid_argument("dot_product: length mismatch");
    }
    // Exact signed accumulation of all product power terms in fixed point:
    // mantissa scaled so the smallest exponent seen is bit 0.
    mp::cpp_int mantissa = 0;
    int lsb_exp = 0;
    bool any = false;
    auto add_term = [&](int sign, int exponent) {
        if (!any) {
            lsb_exp = exponent;
            any = true;
        } else if (exponent < lsb_exp) {
            mantissa <<= (lsb_exp - exponent);
            lsb_exp = exponent;
        }
        const mp::cpp_int term = mp::cpp_int(1) << (exponent - lsb_exp);
        mantissa += sign < 0 ? -term : term;
    };

    for (std::size_t i = 0; i < weights.size(); ++i) {
        const PowerPoly w = code_to_poly(weights[i], w_layout, w_power);
        const PowerPoly a = code_to_poly(activations[i], a_layout, a_power);
        if (w.is_zero() || a.is_zero()) continue;
        const int sign = w.sign * a.sign;
        for (int ew : w.exponents) {
            for (int ea : a.exponents) {
                add_term(sign, ew + ea);
            }
        }
    }

    DotProductResult result;
    result.out_layout = out_layout;
    result.exact = DyadicValue{mantissa, any ? lsb_exp : 0};
    if (accumulator_bits > 0 && mantissa != 0) {
        const unsigned width = mp::msb(mp::cpp_int(abs(mantissa))) + 1;
        result.accumulator_overflow = width > static_cast<unsigned>(accumulator_bits);
    }

    if (mantissa == 0) {
        result.code.field_count = static_cast<std::uint8_t>(out_layout.field_count());
        result.power_j = 0;
        result.quantized_value = 0.0;
        return result;
    }

    if (mode == DotMode::exact) {
        const double value = result.exact.to_double();
        result.power_j = scale_exponent(std::span<const double>(&value, 1));
        result.code = quantize_value(value, out_layout, result.power_j);
        result.quantized_value = reconstruct(result.code, out_layout, result.power_j);
        return result;
    }

    // Rounded mode: compress the exact magnitude's canonical poly to the
    // output budget and re-encode the surviving exponents directly; no
    // intermediate wide re-quantization.
    PowerPoly magnitude = poly_from_value(DyadicValue{abs(mantissa), lsb_exp});
    magnitude = compress(std::move(magnitude), RoundingBudget::from_layout(out_layout));
    if (mantissa < 0) magnitude.sign = -1;
    result.code = encode_compressed(magnitude, out_layout, result.power_j);
    result.quantized_value = reconstruct(result.code, out_layout, result.power_j);
    return result;
}

DotProductResult dot_product(const QuantizedTensor& weights, const QuantizedTensor& activations,
                             const BitLayout& out_layout, DotMode mode, int accumulator_bits) {
    return dot_product(weights.codes, weights.layout, weights.power_j, activations.codes,
                       activations.layout, activations.power_j, out_layout, mode,
                       accumulator_bits);
}

}  // namespace ausn
