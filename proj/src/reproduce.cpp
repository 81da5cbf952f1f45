#include "bellforge/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "bellforge/checks.hpp"
#include "bellforge/io.hpp"
#include "bellforge/lattice.hpp"
#include "bellforge/optimize.hpp"

namespace bellforge {

namespace {

using nlohmann::json;

constexpr double kTsirelson = 2.8284271247461903; // 2 sqrt(2)

SettingsQuad quad_from_supports(const HiddenVariableModel& model) {
    const auto& xs = model.setting_var_x().support;
    const auto& ys = model.setting_var_y().support;
    return {xs[0], xs[1], ys[0], ys[1]};
}

SettingsQuad standard_quad() {
    return {Value{0.0}, Value{M_PI / 2}, Value{5 * M_PI / 4}, Value{3 * M_PI / 4}};
}

CriterionResult criterion_bb1() {
    CriterionResult r{.id = "bb1",
                      .summary = "semi-deterministic model reaches the logical bound",
                      .reference = 4.0,
                      .tolerance = 0.0};
    auto model = bb1();
    auto report = chsh(compose_bb(model), quad_from_supports(model));
    r.computed = report.x_bi;
    bool correlators = report.m_ab == 1.0 && report.m_apb == 1.0 &&
                       report.m_abp == 1.0 && report.m_apbp == -1.0;
    bool non_signaling = true;
    for (const auto& ns : check_no_signaling(model, 1e-12)) non_signaling &= ns.satisfied;
    r.passed = report.x_bi == 4.0 && correlators && non_signaling;
    r.details = {{"correlators_exact", correlators}, {"non_signaling", non_signaling}};
    return r;
}

CriterionResult criterion_dilorenzo() {
    CriterionResult r{.id = "dilorenzo",
                      .summary = "direction-atom model reproduces the singlet statistics",
                      .reference = kTsirelson,
                      .tolerance = 1e-12};
    std::mt19937_64 rng(20260824);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        double a = canonical_angle(angle(rng)), ap = canonical_angle(angle(rng));
        double b = canonical_angle(angle(rng)), bp = canonical_angle(angle(rng));
        if (a == ap || b == bp) continue; // snapped coincidence: degenerate quad
        auto composed = compose_bb(dilorenzo({Value{a}, Value{ap}, Value{b}, Value{bp}}));
        for (std::size_t g = 0; g < composed.given_count(); ++g) {
            auto gv = composed.given_values(g);
            double x = std::get<double>(gv[0]), y = std::get<double>(gv[1]);
            for (std::size_t k = 0; k < composed.target_count(); ++k) {
                auto tv = composed.target_values(k);
                double want = quantum_correlation(std::get<int>(tv[0]),
                                                  std::get<int>(tv[1]), x, y);
                worst = std::max(worst, std::abs(composed.at(g, k) - want));
            }
        }
    }
    auto model = dilorenzo(standard_quad());
    auto report = chsh(compose_bb(model), quad_from_supports(model));
    r.computed = std::abs(report.x_bi);
    auto ns = check_no_signaling(model);
    bool observable_ns = ns[0].satisfied && ns[3].satisfied;
    bool lambda_signaling = !ns[1].satisfied || !ns[4].satisfied;
    r.passed = worst <= 1e-12 && std::abs(r.computed - kTsirelson) <= 1e-12 &&
               observable_ns && lambda_signaling;
    r.details = {{"max_table_deviation", worst},
                 {"observable_level_non_signaling", observable_ns},
                 {"lambda_level_signaling", lambda_signaling}};
    return r;
}

CriterionResult criterion_closed_form() {
    CriterionResult r{.id = "closed-form",
                      .summary = "ladder closed form vs exhaustive enumeration",
                      .reference = 0.0,
                      .tolerance = 1e-10};
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        double beta = 0.05 * i;
        auto brute = bell_conditional(ladder10(1.0, beta));
        auto closed = closed_form_ladder(std::tanh(beta));
        for (std::size_t g = 0; g < 4; ++g)
            for (std::size_t k = 0; k < 4; ++k)
                worst = std::max(worst, std::abs(brute.at(g, k) - closed.at(g, k)));
    }
    r.computed = worst;
    r.passed = worst <= r.tolerance;
    return r;
}

CriterionResult criterion_paper_point() {
    CriterionResult r{.id = "paper-point",
                      .summary = "homogeneous ladder at J = beta = 1",
                      .reference = -0.667,
                      .tolerance = 0.02};
    auto table = bell_conditional(ladder10());
    const Value plus[] = {Value{+1}, Value{+1}};
    double ppp = table.prob(plus, plus);
    auto report = lattice_chsh(ladder10());
    r.computed = report.x_bi;
    r.passed = std::abs(ppp - 0.95) <= 0.01 && std::abs(report.x_bi + 0.667) <= 0.02;
    r.details = {{"p_plus_plus", ppp},
                 {"p_plus_plus_reference", 0.9563},
                 {"x_bi", report.x_bi}};
    return r;
}

CriterionResult criterion_weak_limit() {
    CriterionResult r{.id = "weak-limit",
                      .summary = "weak-coupling asymptote X_BI / K^2 -> -2",
                      .reference = -2.0,
                      .tolerance = 0.05};
    double K = std::tanh(0.05);
    auto report = lattice_chsh(ladder10(1.0, 0.05));
    r.computed = report.x_bi / (K * K);
    r.passed = std::abs(r.computed + 2.0) <= r.tolerance;
    return r;
}

CriterionResult criterion_optimize() {
    CriterionResult r{.id = "optimize",
                      .summary = "symmetric coupling sweep beats the Tsirelson bound",
                      .reference = 2.86,
                      .tolerance = 0.0};
    auto space = paper_grid_space();
    auto result = exhaustive_max(space);
    r.computed = result.best_x;

    std::mt19937_64 rng(1);
    double climb_best = -4.0;
    for (int restart = 0; restart < 100; ++restart)
        climb_best = std::max(climb_best,
                              hill_climb(space, random_assignment(space, rng)).best_x);

    r.passed = result.best_x >= 2.86 && result.best_x > kTsirelson &&
               climb_best >= 2.86;
    r.details = {{"exhaustive_best", result.best_x},
                 {"evaluations", result.evaluations},
                 {"hill_climb_best_of_100_restarts", climb_best},
                 {"exceeds_tsirelson", result.best_x > kTsirelson},
                 {"best_lattice", lattice_to_json(apply_assignment(space, result.best))}};
    return r;
}

// The paper-grid optimum without re-running the exhaustive sweep: restarted
// hill climbing lands on the same grid point in milliseconds.
SpinLattice grid_optimum_lattice() {
    auto space = paper_grid_space();
    std::mt19937_64 rng(1);
    SearchResult best;
    best.best_x = -4.0;
    for (int restart = 0; restart < 100; ++restart) {
        auto res = hill_climb(space, random_assignment(space, rng));
        if (res.best_x > best.best_x) best = res;
    }
    return apply_assignment(space, best.best);
}

CriterionResult criterion_premises() {
    CriterionResult r{.id = "premises",
                      .summary = "lattice models satisfy OI and PI, violate MI",
                      .reference = 0.0,
                      .tolerance = 1e-10};
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> coupling(0.5, 2.0);
    std::uniform_real_distribution<double> field(-0.5, 0.5);
    std::uniform_real_distribution<double> temp(0.5, 1.5);

    std::vector<SpinLattice> lattices;
    for (int draw = 0; draw < 10; ++draw) {
        auto lat = ladder10();
        for (auto& e : lat.edges) e.coupling = coupling(rng);
        for (auto& h : lat.fields) h = field(rng);
        lat.beta = temp(rng);
        lattices.push_back(std::move(lat));
    }
    lattices.push_back(grid_optimum_lattice());

    double worst_local = 0.0;
    bool all_profiles = true;
    for (const auto& lat : lattices) {
        auto model = lattice_as_hv_model(lat, {"4"}, {"3", "6"}, {"5", "8"});
        auto oi = check_oi(model);
        auto pi = check_pi(model);
        worst_local = std::max({worst_local, oi.max_deviation, pi.max_deviation});
        bool any_ns_violated = false;
        for (const auto& ns : check_no_signaling(model))
            any_ns_violated |= !ns.satisfied;
        all_profiles &= oi.satisfied && pi.satisfied && !check_mi(model).satisfied &&
                        any_ns_violated && !check_screening_off(model).satisfied;
    }
    r.computed = worst_local;
    r.passed = all_profiles && worst_local <= 1e-10;
    r.details = {{"lattices", lattices.size()}, {"worst_oi_pi_deviation", worst_local}};
    return r;
}

CriterionResult criterion_theorem_guard() {
    CriterionResult r{.id = "theorem-guard",
                      .summary = "random local models respect the CHSH bound",
                      .reference = 2.0,
                      .tolerance = 1e-9};
    std::mt19937_64 rng(31337);
    double worst_x = 0.0;
    bool fact_matches = true;
    for (int trial = 0; trial < 1000; ++trial) {
        auto model = random_local_model(rng);
        auto report = chsh(compose_bb(model), quad_from_supports(model));
        worst_x = std::max(worst_x, std::abs(report.x_bi));
        bool fact = check_factorability(model).satisfied;
        bool oi_and_pi = check_oi(model).satisfied && check_pi(model).satisfied;
        fact_matches &= fact == oi_and_pi;
    }
    r.computed = worst_x;
    r.passed = worst_x <= 2.0 + 1e-9 && fact_matches;
    r.details = {{"models", 1000}, {"factorability_equals_oi_and_pi", fact_matches}};
    return r;
}

CriterionResult criterion_exploratory() {
    CriterionResult r{.id = "exploratory",
                      .summary = "hexagon sweep and strong-coupling limit (soft)",
                      .reference = 2.82843,
                      .tolerance = 0.0,
                      .hard = false};
    auto hex = exhaustive_max(hexagon_space());
    r.computed = hex.best_x;
    // beta = 20 stands in for the beta -> infinity limit; the conditional is
    // already constant to double precision there.
    auto strong = lattice_chsh(ladder10(1.0, 20.0));
    r.passed = true; // non-gating by design
    r.details = {{"hexagon_grid_max", hex.best_x},
                 {"hexagon_reference", 2.82843},
                 {"hexagon_discrepancy", hex.best_x - 2.82843},
                 {"hexagon_note",
                  "mirror-symmetric sweeps over this ring cap at the classical "
                  "bound 2 even on much wider value grids; the arrangement and "
                  "sweep behind the 2.82843 reference are unspecified"},
                 {"strong_coupling_x_bi", strong.x_bi},
                 {"strong_coupling_reference_claim", 1.0},
                 {"strong_coupling_note",
                  "the beta->infinity ladder value is -2/3, not the claimed ~1"}};
    return r;
}

} // namespace

std::vector<std::string> reproduction_ids() {
    return {"bb1",       "dilorenzo", "closed-form",   "paper-point", "weak-limit",
            "optimize",  "premises",  "theorem-guard", "exploratory"};
}

std::vector<CriterionResult> reproduce_all(const std::vector<std::string>& only) {
    using Runner = CriterionResult (*)();
    const std::pair<std::string, Runner> experiments[] = {
        {"bb1", criterion_bb1},
        {"dilorenzo", criterion_dilorenzo},
        {"closed-form", criterion_closed_form},
        {"paper-point", criterion_paper_point},
        {"weak-limit", criterion_weak_limit},
        {"optimize", criterion_optimize},
        {"premises", criterion_premises},
        {"theorem-guard", criterion_theorem_guard},
        {"exploratory", criterion_exploratory},
    };
    for (const auto& id : only) {
        bool known = std::any_of(std::begin(experiments), std::end(experiments),
                                 [&](const auto& e) { return e.first == id; });
        if (!known) throw ConfigError("unknown experiment id: " + id);
    }
    std::vector<CriterionResult> results;
    for (const auto& [id, runner] : experiments) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        auto t0 = std::chrono::steady_clock::now();
        auto result = runner();
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace bellforge
