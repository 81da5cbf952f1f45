#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bellforge/checks.hpp"

using namespace bellforge;

namespace {

const double kPi = std::acos(-1.0);

void check_recheck(const CheckVerdict& v) {
    if (v.recheck) CHECK(v.recheck() == doctest::Approx(v.max_deviation).epsilon(1e-12));
}

} // namespace

TEST_CASE("bb1 premise profile") {
    auto m = bb1();

    auto oi = check_oi(m);
    CHECK_FALSE(oi.satisfied);
    CHECK(oi.max_deviation == doctest::Approx(0.5).epsilon(1e-12));
    check_recheck(oi);

    auto pi = check_pi(m);
    CHECK(pi.satisfied);
    CHECK(pi.max_deviation <= 1e-12);

    auto mi = check_mi(m);
    CHECK_FALSE(mi.satisfied);
    check_recheck(mi);

    auto fact = check_factorability(m);
    CHECK_FALSE(fact.satisfied);
    check_recheck(fact);

    for (const auto& ns : check_no_signaling(m)) {
        CHECK(ns.satisfied);
        CHECK(ns.max_deviation <= 1e-12);
    }

    auto screen = check_screening_off(m);
    CHECK_FALSE(screen.satisfied);
    check_recheck(screen);
}

TEST_CASE("direction-atom premise profile") {
    SettingsQuad q{0.0, kPi / 2, kPi / 4, 3 * kPi / 4};
    auto m = dilorenzo(q);

    // Outcomes factorize given the full hidden state on both wings.
    CHECK(check_oi(m).satisfied);
    CHECK(check_pi(m).satisfied);

    // The atom distribution depends on the settings.
    auto mi = check_mi(m);
    CHECK_FALSE(mi.satisfied);
    check_recheck(mi);

    auto ns = check_no_signaling(m);
    REQUIRE(ns.size() == 6);
    CHECK(ns[0].satisfied);       // NS1: observable left marginal
    CHECK_FALSE(ns[1].satisfied); // NS2: hidden-variable level signaling
    CHECK_FALSE(ns[2].satisfied); // NS3
    CHECK(ns[3].satisfied);       // NS4: observable right marginal
    CHECK_FALSE(ns[4].satisfied); // NS5
    CHECK_FALSE(ns[5].satisfied); // NS6
    for (const auto& v : ns) check_recheck(v);

    CHECK_FALSE(check_screening_off(m).satisfied);
}

TEST_CASE("local models satisfy every premise") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = random_local_model(rng);
        CHECK(check_oi(m).satisfied);
        CHECK(check_pi(m).satisfied);
        CHECK(check_mi(m).satisfied);
        CHECK(check_factorability(m).satisfied);
        for (const auto& ns : check_no_signaling(m)) CHECK(ns.satisfied);
        CHECK(check_screening_off(m).satisfied);
    }
}

TEST_CASE("factorability tracks oi and pi together") {
    // Violating either outcome independence (bb1) or parameter independence
    // must break factorability; satisfying both (local models) must not.
    CHECK_FALSE(check_factorability(bb1()).satisfied);
    std::mt19937_64 rng(99);
    auto local = random_local_model(rng);
    bool oi_pi = check_oi(local).satisfied && check_pi(local).satisfied;
    CHECK(oi_pi == check_factorability(local).satisfied);
}

TEST_CASE("verdicts carry witnesses and identifiers") {
    auto oi = check_oi(bb1());
    CHECK(oi.condition_id == "OI");
    CHECK_FALSE(oi.witness.empty());
    auto ns = check_no_signaling(bb1());
    CHECK(ns[0].condition_id == "NS1");
    CHECK(ns[5].condition_id == "NS6");
}
