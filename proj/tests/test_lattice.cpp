#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "bellforge/checks.hpp"
#include "bellforge/lattice.hpp"

using namespace bellforge;

namespace {

bool has_edge(const SpinLattice& lat, const std::string& u, const std::string& v) {
    std::size_t i = lat.node_index(u), j = lat.node_index(v);
    for (const auto& e : lat.edges)
        if ((e.i == i && e.j == j) || (e.i == j && e.j == i)) return true;
    return false;
}

std::uint32_t all_plus(const SpinLattice& lat) {
    return (1u << lat.nodes.size()) - 1u;
}

// Reference values from exhaustive 2^10 enumeration at J = beta = 1.
constexpr double kLadderPpp = 0.9563261937724757;
constexpr double kLadderX = -0.6672125985282058;

} // namespace

TEST_CASE("ladder10 topology") {
    auto lat = ladder10();
    CHECK(lat.nodes.size() == 10);
    CHECK(lat.edges.size() == 13);
    for (auto [u, v] : {std::pair{"1", "3"}, {"3", "6"}, {"6", "a"}, {"2", "5"},
                        {"5", "8"}, {"8", "b"}, {"3", "4"}, {"4", "7"}, {"7", "6"},
                        {"4", "5"}, {"8", "7"}, {"1", "a"}, {"2", "b"}})
        CHECK(has_edge(lat, u, v));
    CHECK_FALSE(has_edge(lat, "1", "2"));
    lat.validate();
}

TEST_CASE("hamiltonian on the homogeneous ladder") {
    auto lat = ladder10();
    CHECK(hamiltonian(lat, all_plus(lat)) == -13.0);
    std::uint32_t flipped4 = all_plus(lat) ^ (1u << lat.node_index("4"));
    CHECK(hamiltonian(lat, flipped4) == -7.0);
    // Quadratic term is even under a global flip when fields vanish.
    CHECK(hamiltonian(lat, 0) == hamiltonian(lat, all_plus(lat)));
    CHECK_THROWS_AS(hamiltonian(lat, 1u << 12), ShapeMismatch);
}

TEST_CASE("lattice validation") {
    auto lat = ladder10();
    lat.edges.push_back({0, 0, 1.0});
    CHECK_THROWS_AS(lat.validate(), ShapeMismatch);
    lat = ladder10();
    lat.edges.push_back({lat.node_index("1"), lat.node_index("3"), 2.0});
    CHECK_THROWS_AS(lat.validate(), ShapeMismatch);
    lat = ladder10();
    lat.beta = 0.0;
    CHECK_THROWS_AS(lat.validate(), RangeError);
    lat = ladder10();
    lat.nodes.resize(25, "");
    CHECK_THROWS_AS(lat.validate(), TooManySpins);
}

TEST_CASE("boltzmann distribution normalizes and respects flip symmetry") {
    auto lat = ladder10(1.3, 0.7);
    auto p = boltzmann_joint(lat);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(p[all_plus(lat)] == p[0]); // global flip with h = 0
    // Near-uniform at tiny beta.
    auto cold = ladder10(1.0, 1e-9);
    auto q = boltzmann_joint(cold);
    for (double v : q) CHECK(v == doctest::Approx(1.0 / 1024).epsilon(1e-6));
}

TEST_CASE("boltzmann enumeration survives huge couplings") {
    auto lat = ladder10(50.0, 2.0);
    auto p = boltzmann_joint(lat);
    double sum = 0.0;
    for (double v : p) {
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("paper point values at J = beta = 1") {
    auto table = bell_conditional(ladder10());
    const Value pp_given[] = {Value{+1}, Value{+1}};
    const Value pp[] = {Value{+1}, Value{+1}};
    CHECK(table.prob(pp_given, pp) == doctest::Approx(kLadderPpp).epsilon(1e-13));
    auto report = lattice_chsh(ladder10());
    CHECK(report.x_bi == doctest::Approx(kLadderX).epsilon(1e-13));
}

TEST_CASE("closed form matches enumeration across the beta grid") {
    for (int i = 1; i <= 50; ++i) {
        double beta = 0.05 * i;
        auto brute = bell_conditional(ladder10(1.0, beta));
        auto closed = closed_form_ladder(std::tanh(beta));
        double worst = 0.0;
        for (std::size_t g = 0; g < 4; ++g)
            for (std::size_t k = 0; k < 4; ++k)
                worst = std::max(worst, std::abs(brute.at(g, k) - closed.at(g, k)));
        CHECK(worst <= 1e-10);
    }
    CHECK_THROWS_AS(closed_form_ladder(1.0), RangeError);
    auto flat = closed_form_ladder(0.0);
    for (std::size_t g = 0; g < 4; ++g)
        for (std::size_t k = 0; k < 4; ++k) CHECK(flat.at(g, k) == 0.25);
}

TEST_CASE("weak-coupling asymptote") {
    double K = std::tanh(0.05);
    auto report = lattice_chsh(ladder10(1.0, 0.05));
    CHECK(std::abs(report.x_bi / (K * K) + 2.0) <= 0.05);
}

TEST_CASE("mirror symmetry of the conditional table") {
    auto table = bell_conditional(ladder10(0.8, 1.2));
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1})
            for (int sa : {+1, -1})
                for (int sb : {+1, -1}) {
                    const Value g1[] = {Value{sa}, Value{sb}};
                    const Value t1[] = {Value{s1}, Value{s2}};
                    const Value g2[] = {Value{sb}, Value{sa}};
                    const Value t2[] = {Value{s2}, Value{s1}};
                    CHECK(std::abs(table.prob(g1, t1) - table.prob(g2, t2)) <= 1e-12);
                    // Global flip symmetry at h = 0.
                    const Value g3[] = {Value{-sa}, Value{-sb}};
                    const Value t3[] = {Value{-s1}, Value{-s2}};
                    CHECK(std::abs(table.prob(g1, t1) - table.prob(g3, t3)) <= 1e-12);
                }
}

TEST_CASE("spins depend only on their lattice neighbors") {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> coupling(-2.0, 2.0);
    auto lat = ladder10();
    for (auto& e : lat.edges) e.coupling = coupling(rng);
    for (auto& h : lat.fields) h = 0.5 * coupling(rng);
    lat.beta = 0.9;
    auto p = boltzmann_joint(lat);

    // P(s1 = +1 | rest) must agree between configurations of the rest that
    // match on s1's neighbors (3 and a).
    std::size_t s1 = lat.roles.s1;
    std::uint32_t blanket = (1u << lat.node_index("3")) | (1u << lat.node_index("a"));
    std::vector<double> by_blanket(4, -1.0);
    for (std::uint32_t rest = 0; rest < 1024; ++rest) {
        if ((rest >> s1) & 1u) continue; // enumerate with s1 bit clear
        std::uint32_t up = rest | (1u << s1);
        double cond = p[up] / (p[up] + p[rest]);
        std::uint32_t key = ((rest >> lat.node_index("3")) & 1u) * 2 +
                            ((rest >> lat.node_index("a")) & 1u);
        if (by_blanket[key] < 0)
            by_blanket[key] = cond;
        else
            CHECK(std::abs(by_blanket[key] - cond) <= 1e-12);
    }
    (void)blanket;
}

TEST_CASE("lattice-as-model bridge is exact") {
    auto lat = ladder10();
    auto model = lattice_as_hv_model(lat, {"4", "7"}, {"3", "6"}, {"5", "8"});
    CHECK(validate(model).empty());
    auto composed = compose_bb(model);
    auto direct = bell_conditional(lat);
    for (std::size_t g = 0; g < 4; ++g) {
        auto gv = direct.given_values(g);
        std::size_t g2 = composed.given_index(gv);
        for (std::size_t k = 0; k < 4; ++k) {
            auto tv = direct.target_values(k);
            std::size_t k2 = composed.target_index(tv);
            CHECK(std::abs(direct.at(g, k) - composed.at(g2, k2)) <= 1e-12);
        }
    }
}

TEST_CASE("ladder premise profile") {
    // lambda0 = spin 4; spin 7 stays unassigned and is marginalized, which
    // keeps the two wings coupled through the 6-7-8 path.
    auto model = lattice_as_hv_model(ladder10(), {"4"}, {"3", "6"}, {"5", "8"});
    CHECK(check_oi(model).satisfied);
    CHECK(check_pi(model).satisfied);
    CHECK_FALSE(check_mi(model).satisfied);
    bool any_ns_violated = false;
    for (const auto& ns : check_no_signaling(model)) any_ns_violated |= !ns.satisfied;
    CHECK(any_ns_violated);
    CHECK_FALSE(check_screening_off(model).satisfied);
}

TEST_CASE("conditioning on the full middle column screens the wings off") {
    // (4, 7) is a graph separator between the two halves, so putting both
    // spins into lambda0 makes lambda1 and lambda2 conditionally independent.
    auto model = lattice_as_hv_model(ladder10(), {"4", "7"}, {"3", "6"}, {"5", "8"});
    CHECK(check_screening_off(model).satisfied);
}

TEST_CASE("partition errors") {
    auto lat = ladder10();
    CHECK_THROWS_AS(lattice_as_hv_model(lat, {"4", "7"}, {"3", "6"}, {"5", "8", "3"}),
                    PartitionError);
    CHECK_THROWS_AS(lattice_as_hv_model(lat, {"4", "7"}, {"3", "6"}, {"5", "8", "zz"}),
                    PartitionError);
    CHECK_THROWS_AS(lattice_as_hv_model(lat, {"4", "a"}, {"3", "6"}, {"5", "8"}),
                    PartitionError);
}

TEST_CASE("hexagon ring") {
    auto hex = hexagon6();
    CHECK(hex.nodes.size() == 6);
    CHECK(hex.edges.size() == 6);
    hex.validate();
    CHECK_THROWS_AS(hexagon6({"a", "1", "u", "2", "b"}), BadArrangement);
    CHECK_THROWS_AS(hexagon6({"a", "1", "u", "2", "u", "v"}), BadArrangement);
    CHECK_THROWS_AS(hexagon6({"a", "1", "u", "2", "v", "w"}), BadArrangement);
    auto cold = hexagon6({"a", "1", "u", "2", "b", "v"}, 1.0, 1e-9);
    auto table = bell_conditional(cold);
    for (std::size_t g = 0; g < 4; ++g)
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(table.at(g, k) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("worker count override") {
    setenv("BELLFORGE_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("BELLFORGE_WORKERS", "junk", 1);
    CHECK(worker_count() >= 1);
    unsetenv("BELLFORGE_WORKERS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("enumeration is identical across worker counts") {
    setenv("BELLFORGE_WORKERS", "1", 1);
    auto p1 = boltzmann_joint(ladder10(1.7, 0.6));
    setenv("BELLFORGE_WORKERS", "4", 1);
    auto p4 = boltzmann_joint(ladder10(1.7, 0.6));
    unsetenv("BELLFORGE_WORKERS");
    CHECK(p1 == p4);
}
