#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ausn/analysis.hpp"
#include "ausn/rng.hpp"

using namespace ausn;

TEST_CASE("KL is zero when the quantizer reproduces the input") {
    const BitLayout layout = make_layout(6, 3, {2});
    const std::vector<double> data{0.5, -0.25, 0.75, 0.0, 0.5};
    const QuantizedTensor qt = quantize_tensor(data, layout, RoundingMode::floor, 0);
    const InfoLossReport report = kl_information_loss(data, qt);
    CHECK(report.kl == 0.0);
}

TEST_CASE("KL bin masses each sum to one") {
    const auto data = seeded_normal(3, 20000);
    const BitLayout layout = make_layout(5, 3, {1});
    const QuantizedTensor qt = quantize_tensor(data, layout);
    const InfoLossReport report = kl_information_loss(data, qt);
    double original = 0, quantized = 0;
    for (const InfoBin& bin : report.bins) {
        original += bin.original_mass;
        quantized += bin.quantized_mass;
    }
    CHECK(original == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(quantized == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.kl > 0.0);
}

TEST_CASE("KL shrinks when the level set is refined by nesting") {
    // Not every containment pair lowers this KL (the floor-assigned mass
    // drifts from the geometric binning as tiers subdivide); the pinned
    // pair adds the first subdivision bit to a pure power layout, which
    // does. Checked for every scale offset and both modes.
    const auto data = seeded_normal(5, 50000);
    const auto coarse_levels = representable_magnitudes(make_layout(5, 4, {}), 2);
    const auto fine_levels = representable_magnitudes(make_layout(6, 4, {1}), 2);
    for (double v : coarse_levels) {
        CHECK(std::binary_search(fine_levels.begin(), fine_levels.end(), v));
    }
    for (int power_j : {0, 1, 2}) {
        for (RoundingMode mode : {RoundingMode::floor, RoundingMode::nearest}) {
            const QuantizedTensor coarse =
                quantize_tensor(data, make_layout(5, 4, {}), mode, power_j);
            const QuantizedTensor fine =
                quantize_tensor(data, make_layout(6, 4, {1}), mode, power_j);
            CHECK(kl_information_loss(data, fine).kl <=
                  kl_information_loss(data, coarse).kl);
        }
    }
}

TEST_CASE("degenerate quantization collapses to one KL bin") {
    // Everything floors to zero: both distributions sit in the zero bin.
    const std::vector<double> tiny{1e-4, -2e-4, 5e-5};
    const QuantizedTensor qt =
        quantize_tensor(tiny, make_layout(4, 3, {}), RoundingMode::floor, 0);
    const InfoLossReport report = kl_information_loss(tiny, qt);
    CHECK(report.bins.size() == 1);
    CHECK(report.kl == 0.0);
}

TEST_CASE("total information loss adds the externally supplied accuracy term") {
    CHECK(total_information_loss(0.014, -0.001) == doctest::Approx(0.013).epsilon(1e-12));
    CHECK(total_information_loss(0.004, 3.23) == doctest::Approx(3.234).epsilon(1e-12));
    CHECK(total_information_loss(0.27, std::nullopt) == 0.27);
    CHECK_THROWS_AS(total_information_loss(-0.1, std::nullopt), std::invalid_argument);
}

TEST_CASE("uniform baseline quantizes symmetrically") {
    SUBCASE("zero maps to zero") {
        const auto r = baseline_uniform(std::vector<double>{0.0, 1.0}, 4);
        CHECK(r.dequantized[0] == 0.0);
    }
    SUBCASE("grid input round-trips exactly") {
        const int bits = 4;
        const double scale = 0.125;
        std::vector<double> grid;
        for (int q = -7; q <= 7; ++q) grid.push_back(q * scale);
        const auto r = baseline_uniform(grid, bits);
        CHECK(r.scale == doctest::Approx(scale).epsilon(1e-12));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(r.dequantized[i] == doctest::Approx(grid[i]).epsilon(1e-12));
        }
    }
    SUBCASE("a fixed unit scale clips 6 to the boundary 3") {
        const auto r = baseline_uniform(std::vector<double>{6.0}, 3, 1.0);
        CHECK(r.codes[0] == 3);
        CHECK(r.dequantized[0] == 3.0);
    }
    SUBCASE("all-zero tensor stays zero without dividing by zero") {
        const auto r = baseline_uniform(std::vector<double>{0.0, 0.0}, 4);
        CHECK(r.scale == 0.0);
        CHECK(r.dequantized == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("needs at least two bits") {
        CHECK_THROWS_AS(baseline_uniform(std::vector<double>{1.0}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("power-of-two baseline rounds 6 to a neighboring power") {
    const std::vector<double> six{6.0};
    const auto floor_qt = baseline_power_of_two(six, 4, RoundingMode::floor);
    CHECK(dequantize_tensor(floor_qt)[0] == 4.0);
    const auto nearest_qt = baseline_power_of_two(six, 4, RoundingMode::nearest);
    const double rounded = dequantize_tensor(nearest_qt)[0];
    CHECK((rounded == 4.0 || rounded == 8.0));

    // The default scale puts the range top at half the tensor maximum, so
    // the largest element always clips; a raised scale makes exact powers
    // of two representable with zero error.
    const std::vector<double> powers{0.5, -2.0, 1.0, 0.125};
    const auto clipped = baseline_power_of_two(powers, 5);
    CHECK(dequantize_tensor(clipped)[1] == -1.0);
    const auto exact = quantize_tensor(powers, make_layout(5, 4, {}), RoundingMode::floor,
                                       scale_exponent(powers) + 1);
    CHECK(dequantize_tensor(exact) == powers);
}

TEST_CASE("subdivision beats the pure power baseline on normal data") {
    const auto data = seeded_normal(29, 20000);
    const SearchResult searched = search_layout(data, 5, 2);
    const QuantizedTensor pure = baseline_power_of_two(data, 5);
    const ErrorPair pure_errors = empirical_errors(data, pure);
    CHECK(searched.errors.clipping + searched.errors.rounding <=
          pure_errors.clipping + pure_errors.rounding);
}

TEST_CASE("sqnr") {
    SUBCASE("exact reconstruction reports the infinity sentinel") {
        const std::vector<double> x{1.0, -2.0, 0.5};
        CHECK(sqnr_db(x, x) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("all-zero dequantization gives 0 dB") {
        const std::vector<double> x{1.0, -1.0};
        const std::vector<double> zero{0.0, 0.0};
        CHECK(sqnr_db(x, zero) == 0.0);
    }
    SUBCASE("matches an independent recomputation") {
        const auto x = seeded_normal(57, 1000);
        const BitLayout layout = make_layout(6, 3, {2});
        const auto dequant = dequantize_tensor(quantize_tensor(x, layout));
        double num = 0, den = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += x[i] * x[i];
            den += (x[i] - dequant[i]) * (x[i] - dequant[i]);
        }
        CHECK(sqnr_db(x, dequant) ==
              doctest::Approx(10.0 * std::log10(num / den)).epsilon(1e-12));
    }
    SUBCASE("zero signal is undefined") {
        const std::vector<double> zero{0.0};
        CHECK_THROWS_AS(sqnr_db(zero, zero), std::domain_error);
    }
}
