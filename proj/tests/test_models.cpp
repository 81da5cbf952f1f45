#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bellforge/model.hpp"

using namespace bellforge;

namespace {

const double kPi = std::acos(-1.0);

double max_joint_gap(const ConditionalTable& lhs, const ConditionalTable& rhs) {
    REQUIRE(lhs.given_count() == rhs.given_count());
    REQUIRE(lhs.target_count() == rhs.target_count());
    double worst = 0.0;
    for (std::size_t g = 0; g < lhs.given_count(); ++g) {
        auto values = lhs.given_values(g);
        std::size_t g2 = rhs.given_index(values);
        for (std::size_t k = 0; k < lhs.target_count(); ++k)
            worst = std::max(worst, std::abs(lhs.at(g, k) - rhs.at(g2, k)));
    }
    return worst;
}

} // namespace

TEST_CASE("bb1 is well-formed") {
    auto m = bb1();
    CHECK(validate(m).empty());
    CHECK(m.strict_background_shape());
}

TEST_CASE("bb1 saturates the algebraic bound") {
    auto joint = compose_bb(bb1());
    SettingsQuad q{std::string("a"), std::string("a'"), std::string("b"), std::string("b'")};
    auto r = chsh(joint, q);
    CHECK(r.m_ab == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.m_apb == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.m_abp == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.m_apbp == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(r.x_bi == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("bb1 observable joint is the perfectly (anti)correlated box") {
    auto joint = compose_bb(bb1());
    const Value ab[] = {std::string("a"), std::string("b")};
    const Value pp[] = {Value{+1}, Value{+1}};
    const Value pm[] = {Value{+1}, Value{-1}};
    CHECK(joint.prob(ab, pp) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(joint.prob(ab, pm) == doctest::Approx(0.0).epsilon(1e-15));
    const Value apbp[] = {std::string("a'"), std::string("b'")};
    CHECK(joint.prob(apbp, pp) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(joint.prob(apbp, pm) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("direction-atom model reproduces the singlet joint") {
    std::vector<SettingsQuad> quads = {
        {0.0, kPi / 2, kPi / 4, 3 * kPi / 4},
        {0.3, 1.9, 0.8, 2.6},
        {0.0, kPi, kPi / 3, 4 * kPi / 3}, // antipodal atoms coincide
        {-0.4, 5.1, 2.2, -2.2},           // wrap-around angles
    };
    for (const auto& q : quads) {
        auto m = dilorenzo(q);
        CHECK(validate(m).empty());
        auto joint = compose_bb(m);
        auto reference = quantum_table({std::get<double>(q.a), std::get<double>(q.a_prime)},
                                       {std::get<double>(q.b), std::get<double>(q.b_prime)});
        // The observable joint has the canonicalized angles as supports.
        double worst = 0.0;
        for (int s1 : {+1, -1})
            for (int s2 : {+1, -1})
                for (const Value& x : joint.given_vars()[0].support)
                    for (const Value& y : joint.given_vars()[1].support) {
                        const Value given[] = {x, y};
                        const Value target[] = {Value{s1}, Value{s2}};
                        double expected =
                            quantum_correlation(s1, s2, std::get<double>(x), std::get<double>(y));
                        worst = std::max(worst, std::abs(joint.prob(given, target) - expected));
                    }
        CHECK(worst <= 1e-12);
        (void)reference;
    }
}

TEST_CASE("direction-atom chsh hits the Tsirelson value at the optimal quad") {
    SettingsQuad q{0.0, kPi / 2, 5 * kPi / 4, 3 * kPi / 4};
    auto joint = compose_bb(dilorenzo(q));
    SettingsQuad canonical{canonical_angle(0.0), canonical_angle(kPi / 2),
                           canonical_angle(5 * kPi / 4), canonical_angle(3 * kPi / 4)};
    auto r = chsh(joint, canonical);
    CHECK(std::abs(r.x_bi) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("canonical_angle wraps into [0, 2pi)") {
    CHECK(canonical_angle(0.0) == 0.0);
    CHECK(canonical_angle(2 * kPi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(canonical_angle(-0.5) == doctest::Approx(2 * kPi - 0.5).epsilon(1e-14));
    double a = canonical_angle(7 * kPi + 0.1);
    CHECK(a >= 0.0);
    CHECK(a < 2 * kPi);
}

TEST_CASE("local composition agrees with the background wrapping") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = random_local_model(rng);
        CHECK(validate(m).empty());
        auto joint = compose_bb(m);
        for (double r : joint.row_residuals()) CHECK(r <= 1e-12);
        SettingsQuad q{std::string("a"), std::string("a'"), std::string("b"),
                       std::string("b'")};
        auto report = chsh(joint, q);
        CHECK(std::abs(report.x_bi) <= 2.0 + 1e-10);
    }
}

TEST_CASE("compose_full marginalizes to compose_bb") {
    auto m = bb1();
    auto full = compose_full(m).marginalize({"l0", "l1", "l2"});
    CHECK(max_joint_gap(full, compose_bb(m)) <= 1e-15);
}

TEST_CASE("random local models are seed-deterministic") {
    std::mt19937_64 rng1(7), rng2(7);
    auto m1 = random_local_model(rng1);
    auto m2 = random_local_model(rng2);
    CHECK(compose_bb(m1).entries() == compose_bb(m2).entries());
}
