#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bellforge/prob.hpp"

using namespace bellforge;

namespace {

ConditionalTable coin_pair() {
    // P(u, v | c) with c in {0, 1}: independent fair coins vs. perfectly
    // correlated coins.
    return ConditionalTable::make({{"c", {0, 1}}},
                                  {{"u", {+1, -1}}, {"v", {+1, -1}}},
                                  {0.25, 0.25, 0.25, 0.25, 0.5, 0.0, 0.0, 0.5});
}

} // namespace

TEST_CASE("mixed-radix indexing is first-variable-major") {
    auto t = coin_pair();
    CHECK(t.given_count() == 2);
    CHECK(t.target_count() == 4);
    const Value g1[] = {Value{1}};
    CHECK(t.given_index(g1) == 1);
    const Value uv[] = {Value{-1}, Value{+1}};
    CHECK(t.target_index(uv) == 2);
    CHECK(t.prob(g1, uv) == 0.0);
    auto back = t.target_values(2);
    CHECK(back[0] == Value{-1});
    CHECK(back[1] == Value{+1});
}

TEST_CASE("rows within the normalization slack are rescaled exactly") {
    double eps = 2e-13;
    auto t = ConditionalTable::make({}, {{"u", {0, 1}}}, {0.5 + eps, 0.5});
    CHECK(t.row_residuals()[0] <= 1e-15);
}

TEST_CASE("rows beyond the slack are rejected") {
    CHECK_THROWS_AS(ConditionalTable::make({}, {{"u", {0, 1}}}, {0.6, 0.5}),
                    NormalizationError);
    CHECK_THROWS_AS(ConditionalTable::make({}, {{"u", {0, 1}}}, {1.2, -0.2}), RangeError);
    CHECK_THROWS_AS(ConditionalTable::make({}, {{"u", {0, 1}}}, {1.0}), IncompleteError);
}

TEST_CASE("make_unnormalized keeps residuals visible") {
    auto t = ConditionalTable::make_unnormalized({}, {{"u", {0, 1}}}, {0.3, 0.3});
    CHECK(t.row_residuals()[0] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("marginalize sums the dropped variable and keeps order") {
    auto t = coin_pair();
    auto m = t.marginalize({"v"});
    CHECK(m.target_vars().size() == 1);
    CHECK(m.target_vars()[0].name == "u");
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t k = 0; k < 2; ++k) CHECK(m.at(g, k) == 0.5);
}

TEST_CASE("total variation between table rows") {
    auto t = coin_pair();
    const Value g0[] = {Value{0}};
    double tv = total_variation(t, t, g0);
    CHECK(tv == 0.0);
    const double p[] = {0.25, 0.25, 0.25, 0.25};
    const double q[] = {0.5, 0.0, 0.0, 0.5};
    CHECK(total_variation(p, q) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("duplicate support values are rejected") {
    CHECK_THROWS_AS(ConditionalTable::make({}, {{"u", {0, 0}}}, {0.5, 0.5}), RangeError);
}

TEST_CASE("unknown variable lookups throw") {
    auto t = coin_pair();
    CHECK_THROWS_AS(t.target_position("w"), UnknownVariable);
    const Value bad[] = {Value{7}};
    CHECK_THROWS_AS(t.given_index(bad), UnknownVariable);
}
