#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bellforge/bell.hpp"

using namespace bellforge;

namespace {

const double kPi = std::acos(-1.0);

// Deterministic perfect correlation at (a,b), (a',b), (a,b') and perfect
// anti-correlation at (a',b'): saturates the algebraic bound of 4.
ConditionalTable pr_like_joint() {
    std::vector<VariableSpec> given = {{"x", {std::string("a"), std::string("a'")}},
                                       {"y", {std::string("b"), std::string("b'")}}};
    std::vector<VariableSpec> target = {{"s1", {+1, -1}}, {"s2", {+1, -1}}};
    std::vector<double> entries = {
        0.5, 0.0, 0.0, 0.5, // (a, b)
        0.5, 0.0, 0.0, 0.5, // (a, b')
        0.5, 0.0, 0.0, 0.5, // (a', b)
        0.0, 0.5, 0.5, 0.0, // (a', b')
    };
    return ConditionalTable::make(std::move(given), std::move(target), std::move(entries));
}

} // namespace

TEST_CASE("correlator on a deterministic joint") {
    auto joint = pr_like_joint();
    CHECK(correlator(joint, std::string("a"), std::string("b")) == 1.0);
    CHECK(correlator(joint, std::string("a'"), std::string("b'")) == -1.0);
    CHECK_THROWS_AS(correlator(joint, std::string("c"), std::string("b")), UnknownSetting);
}

TEST_CASE("chsh saturates the algebraic bound on the PR-like joint") {
    SettingsQuad q{std::string("a"), std::string("a'"), std::string("b"), std::string("b'")};
    auto r = chsh(pr_like_joint(), q);
    CHECK(r.m_ab == 1.0);
    CHECK(r.m_apb == 1.0);
    CHECK(r.m_abp == 1.0);
    CHECK(r.m_apbp == -1.0);
    CHECK(r.x_bi == 4.0);
}

TEST_CASE("settings quads need distinct settings per wing") {
    SettingsQuad q{std::string("a"), std::string("a"), std::string("b"), std::string("b'")};
    CHECK_THROWS_AS(q.validate(), UnknownSetting);
}

TEST_CASE("singlet joint reaches the Tsirelson value") {
    std::vector<double> xs = {0.0, kPi / 2};
    std::vector<double> ys = {5 * kPi / 4, 3 * kPi / 4};
    auto joint = quantum_table(xs, ys);
    SettingsQuad q{0.0, kPi / 2, 5 * kPi / 4, 3 * kPi / 4};
    auto r = chsh(joint, q);
    CHECK(std::abs(r.x_bi) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("quantum joint is non-negative and normalized") {
    auto joint = quantum_table({0.3, 1.7}, {0.9, 2.4});
    for (double r : joint.row_residuals()) CHECK(r <= 1e-14);
}

TEST_CASE("chsh_scan picks the largest magnitude with earliest tie-break") {
    auto joint = pr_like_joint();
    SettingsQuad weak{std::string("a'"), std::string("a"), std::string("b"),
                      std::string("b'")};
    SettingsQuad best{std::string("a"), std::string("a'"), std::string("b"),
                      std::string("b'")};
    auto [report, argmax] = chsh_scan(joint, {weak, best, best});
    CHECK(std::abs(report.x_bi) == 4.0);
    CHECK(argmax.a == best.a);
    // Equal-magnitude duplicates keep the earlier entry.
    auto [r2, arg2] = chsh_scan(joint, {best, weak});
    CHECK(arg2.a == best.a);
    CHECK_THROWS_AS(chsh_scan(joint, {}), EmptyGrid);
}

TEST_CASE("quantum correlation matches the closed form") {
    for (double a : {0.0, 0.7, 2.9})
        for (double b : {0.1, 1.3}) {
            double m = 0.0;
            for (int s1 : {+1, -1})
                for (int s2 : {+1, -1}) m += s1 * s2 * quantum_correlation(s1, s2, a, b);
            CHECK(m == doctest::Approx(-std::cos(a - b)).epsilon(1e-14));
        }
}
