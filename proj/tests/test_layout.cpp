#include <doctest.h>

#include <stdexcept>

#include "ausn/layout.hpp"

using namespace ausn;

TEST_CASE("make_layout accepts the documented splits") {
    const BitLayout six = make_layout(6, 3, {2});
    CHECK(six.total_bits == 6);
    CHECK(six.b_basic == 3);
    CHECK(six.tier_bits == std::vector<int>{2});
    CHECK(six.tiers() == 1);

    const BitLayout pure = make_layout(5, 4, {});  // degenerate n = 0
    CHECK(pure.tiers() == 0);
    CHECK(pure.max_code(0) == 15);

    const BitLayout five = make_layout(5, 3, {1});
    CHECK(five.field_bits(1) == 1);
    CHECK(five.field_count() == 2);
}

TEST_CASE("make_layout rejects bad field arithmetic") {
    CHECK_THROWS_AS(make_layout(6, 3, {3}), std::invalid_argument);  // 1+3+3 != 6
    CHECK_THROWS_AS(make_layout(6, 0, {5}), std::invalid_argument);
    CHECK_THROWS_AS(make_layout(6, 4, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(make_layout(17, 12, {4}), std::invalid_argument);
    CHECK_THROWS_AS(make_layout(8, 3, {1, 1, 1, 1}), std::invalid_argument);  // > n_max
    CHECK_NOTHROW(make_layout(8, 3, {1, 1, 1, 1}, 4));
}

TEST_CASE("tier-0 basis lists descending powers below the shift") {
    const BitLayout layout = make_layout(5, 3, {1});

    SUBCASE("unshifted") {
        const PowerBasis b = basis(layout, 0, 0);
        REQUIRE(b.values.size() == 8);
        CHECK(b.values[0] == 0.0);
        CHECK(b.values[1] == 0.5);
        CHECK(b.values[2] == 0.25);
        CHECK(b.values[7] == 1.0 / 128.0);
    }
    SUBCASE("shifted by 3") {
        const PowerBasis b = basis(layout, 0, 3);
        CHECK(b.values[0] == 0.0);
        CHECK(b.values[1] == 4.0);
        CHECK(b.values[2] == 2.0);
        CHECK(b.values[3] == 1.0);
        CHECK(b.values[7] == 1.0 / 16.0);
    }
    SUBCASE("1-bit tier") {
        const PowerBasis b = basis(layout, 1, 0);
        REQUIRE(b.values.size() == 2);
        CHECK(b.values[0] == 0.0);
        CHECK(b.values[1] == 0.5);
    }
    SUBCASE("tier out of range") {
        CHECK_THROWS_AS(basis(layout, 2, 0), std::out_of_range);
    }
}

TEST_CASE("basis values halve step by step") {
    const BitLayout layout = make_layout(6, 4, {1});
    const PowerBasis b = basis(layout, 0, 2);
    for (std::size_t k = 1; k + 1 < b.values.size(); ++k) {
        CHECK(b.values[k] == b.values[k + 1] * 2.0);
    }
}

TEST_CASE("code validation enforces the chain invariants") {
    const BitLayout layout = make_layout(7, 3, {2, 1});

    CodeWord ok;
    ok.field_count = 3;
    ok.k = {1, 2, 1};
    CHECK_NOTHROW(validate_code(ok, layout));

    CodeWord negative_zero;
    negative_zero.field_count = 3;
    negative_zero.negative = true;
    CHECK_THROWS_AS(validate_code(negative_zero, layout), std::invalid_argument);

    CodeWord zero_with_tail;
    zero_with_tail.field_count = 3;
    zero_with_tail.k = {0, 1, 0};
    CHECK_THROWS_AS(validate_code(zero_with_tail, layout), std::invalid_argument);

    CodeWord broken_chain;
    broken_chain.field_count = 3;
    broken_chain.k = {1, 0, 1};
    CHECK_THROWS_AS(validate_code(broken_chain, layout), std::invalid_argument);

    CodeWord too_wide;
    too_wide.field_count = 3;
    too_wide.k = {1, 4, 0};  // tier 1 holds 2 bits
    CHECK_THROWS_AS(validate_code(too_wide, layout), std::invalid_argument);

    CodeWord wrong_count;
    wrong_count.field_count = 2;
    wrong_count.k = {1, 1, 0};
    CHECK_THROWS_AS(validate_code(wrong_count, layout), std::invalid_argument);
}
