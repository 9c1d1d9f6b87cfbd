#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ausn/quantizer.hpp"
#include "ausn/rng.hpp"
#include "oracle.hpp"

using namespace ausn;

TEST_CASE("scale_exponent is the ceiling of log2 max|w|") {
    CHECK(scale_exponent(std::vector<double>{1.0, -6.0, 2.0}) == 3);
    CHECK(scale_exponent(std::vector<double>{1.0}) == 0);
    CHECK(scale_exponent(std::vector<double>{0.3}) == -1);
    CHECK(scale_exponent(std::vector<double>{0.5}) == -1);
    CHECK(scale_exponent(std::vector<double>{-8.0}) == 3);

    CHECK_THROWS_AS(scale_exponent(std::vector<double>{0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(scale_exponent(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(scale_exponent(std::vector<double>{1.0, NAN}), std::invalid_argument);
}

TEST_CASE("preconvert shifts the basis entrywise") {
    const BitLayout layout = make_layout(4, 3, {});
    const PowerBasis ori = basis(layout, 0, 0);

    const PowerBasis pre = preconvert(ori, 3);
    CHECK(pre.shift == 3);
    CHECK(pre.values[0] == 0.0);
    CHECK(pre.values[1] == 4.0);
    CHECK(pre.values[2] == 2.0);
    CHECK(pre.values[3] == 1.0);
    CHECK(pre.values[7] == 1.0 / 16.0);

    const PowerBasis same = preconvert(ori, 0);
    CHECK(same.values == ori.values);

    // max|W| = 6 with power_j = 3: the shifted maximum 4 brackets 6 from below.
    CHECK(pre.values[1] <= 6.0);
    CHECK(6.0 <= 2.0 * pre.values[1]);
    CHECK(range_bracket_holds(3, 6.0));
}

TEST_CASE("quantize_value follows the greedy tier descent") {
    const BitLayout layout = make_layout(6, 3, {2});

    SUBCASE("0.75 hits an exact two-term superposition") {
        const CodeWord code = quantize_value(0.75, layout, 0);
        CHECK(code.k[0] == 1);
        CHECK(code.k[1] == 1);
        CHECK_FALSE(code.negative);
        CHECK(reconstruct(code, layout, 0) == 0.75);
    }
    SUBCASE("zero maps to the zero code") {
        const CodeWord code = quantize_value(0.0, layout, 0);
        CHECK(code.is_zero());
        CHECK_FALSE(code.negative);
        CHECK(reconstruct(code, layout, 0) == 0.0);
    }
    SUBCASE("0.3 floors to 0.28125") {
        const CodeWord code = quantize_value(0.3, layout, 0);
        CHECK(code.k[0] == 2);
        CHECK(code.k[1] == 3);
        CHECK(reconstruct(code, layout, 0) == 0.28125);
    }
    SUBCASE("-0.5 is an exact basis hit with the chain stopped") {
        const CodeWord code = quantize_value(-0.5, layout, 0);
        CHECK(code.negative);
        CHECK(code.k[0] == 1);
        CHECK(code.k[1] == 0);
        CHECK(reconstruct(code, layout, 0) == -0.5);
    }
    SUBCASE("non-finite input is rejected") {
        CHECK_THROWS_AS(quantize_value(NAN, layout, 0), std::invalid_argument);
        CHECK_THROWS_AS(quantize_value(INFINITY, layout, 0), std::invalid_argument);
    }
}

TEST_CASE("reconstruct rebuilds superposed powers exactly") {
    // 3 = 2^1 + 2^0 and 7 = 2^2 + 2^1 + 2^0.
    const BitLayout two_tier = make_layout(6, 3, {2});
    const CodeWord three = quantize_value(3.0, two_tier, 2);
    CHECK(three.k[0] == 1);
    CHECK(three.k[1] == 1);
    CHECK(reconstruct(three, two_tier, 2) == 3.0);

    const BitLayout three_tier = make_layout(7, 3, {2, 1});
    const CodeWord seven = quantize_value(7.0, three_tier, 3);
    CHECK(reconstruct(seven, three_tier, 3) == 7.0);
}

TEST_CASE("floor mode matches the brute-force oracle on a fine grid") {
    const BitLayout layouts[] = {
        make_layout(5, 3, {1}), make_layout(6, 3, {2}), make_layout(6, 2, {2, 1}),
    };
    for (const BitLayout& layout : layouts) {
        for (int power_j : {0, 2}) {
            const auto levels = oracle::levels(layout, power_j);
            const double span = std::ldexp(1.0, power_j + 1);
            for (int i = 0; i <= 2000; ++i) {
                const double w = -span + 2.0 * span * i / 2000.0;
                const CodeWord code = quantize_value(w, layout, power_j);
                const double sign = w < 0 ? -1.0 : 1.0;
                const double expected = sign * oracle::floor_level(levels, std::fabs(w));
                CHECK(reconstruct(code, layout, power_j) == expected);
            }
        }
    }
}

TEST_CASE("values above the range clip to the representable maximum") {
    const BitLayout layout = make_layout(7, 3, {2, 1});
    const auto levels = oracle::levels(layout, 0);
    const double top = levels.back();
    CHECK(top == 0.875);
    CHECK(reconstruct(quantize_value(10.0, layout, 0), layout, 0) == top);
    CHECK(reconstruct(quantize_value(10.0, layout, 0, RoundingMode::nearest), layout, 0) == top);
    CHECK(reconstruct(quantize_value(-123.0, layout, 0), layout, 0) == -top);
}

TEST_CASE("floor quantization is monotone") {
    const BitLayout layout = make_layout(6, 3, {2});
    const auto samples = seeded_normal(17, 400);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double prev = -INFINITY;
    for (double w : sorted) {
        const double q = reconstruct(quantize_value(w, layout, 1), layout, 1);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("representable values quantize to themselves") {
    const BitLayout layout = make_layout(6, 2, {2, 1});
    for (int power_j : {-1, 0, 3}) {
        for (double level : representable_magnitudes(layout, power_j)) {
            CHECK(reconstruct(quantize_value(level, layout, power_j), layout, power_j) == level);
            CHECK(reconstruct(quantize_value(-level, layout, power_j), layout, power_j) ==
                  -level);
        }
    }
}

TEST_CASE("nearest mode never loses to floor mode") {
    const BitLayout layout = make_layout(6, 3, {2});
    const auto samples = seeded_normal(23, 500);
    for (double w : samples) {
        const double f = reconstruct(quantize_value(w, layout, 0), layout, 0);
        const double n =
            reconstruct(quantize_value(w, layout, 0, RoundingMode::nearest), layout, 0);
        CHECK(std::fabs(w - n) <= std::fabs(w - f));
    }
}

TEST_CASE("representable_magnitudes agrees with the odometer oracle") {
    const BitLayout layouts[] = {
        make_layout(5, 3, {1}), make_layout(6, 3, {2}), make_layout(7, 2, {2, 2}),
    };
    for (const BitLayout& layout : layouts) {
        CHECK(representable_magnitudes(layout, 0) == oracle::levels(layout, 0));
        CHECK(representable_magnitudes(layout, -2) == oracle::levels(layout, -2));
    }
}

TEST_CASE("quantize_tensor composes the element operation") {
    const BitLayout layout = make_layout(6, 3, {2});
    const std::vector<double> data{0.75, 0.0, -0.5};
    const QuantizedTensor qt = quantize_tensor(data, layout);
    CHECK(qt.power_j == 0);
    CHECK(qt.size() == 3);
    const auto dequant = dequantize_tensor(qt);
    CHECK(dequant == std::vector<double>{0.75, 0.0, -0.5});
    REQUIRE(qt.origin_stats.has_value());
    CHECK(qt.origin_stats->count == 3);
    CHECK(qt.origin_stats->min == -0.5);
    CHECK(qt.origin_stats->max == 0.75);
}

TEST_CASE("all-zero tensors quantize to all-zero codes") {
    const BitLayout layout = make_layout(5, 4, {});
    const QuantizedTensor qt = quantize_tensor(std::vector<double>{0.0, 0.0, 0.0}, layout);
    CHECK(qt.power_j == 0);
    for (const CodeWord& code : qt.codes) CHECK(code.is_zero());
}

TEST_CASE("floor dequantization never exceeds the source magnitude") {
    const BitLayout layout = make_layout(5, 3, {1});
    const auto data = seeded_normal(31, 300);
    const QuantizedTensor qt = quantize_tensor(data, layout);
    const auto dequant = dequantize_tensor(qt);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(std::fabs(dequant[i]) <= std::fabs(data[i]));
    }
    // The produced tensor satisfies the range bracket.
    CHECK(range_bracket_holds(qt.power_j, qt.origin_stats->count
                                              ? std::max(std::fabs(qt.origin_stats->min),
                                                         std::fabs(qt.origin_stats->max))
                                              : 0.0));
}

TEST_CASE("shape mismatch is rejected") {
    const BitLayout layout = make_layout(5, 4, {});
    CHECK_THROWS_AS(quantize_tensor(std::vector<double>{1.0, 2.0}, {3}, layout),
                    std::invalid_argument);
}
