#include "bellforge/bell.hpp"

#include <cmath>

namespace bellforge {

namespace {

bool is_pm_one(const VariableSpec& v) {
    return v.support.size() == 2 && v.support[0] == Value{+1} && v.support[1] == Value{-1};
}

int as_sign(const Value& v) { return std::get<int>(v); }

} // namespace

void SettingsQuad::validate() const {
    if (a == a_prime) throw UnknownSetting("settings a and a' must differ");
    if (b == b_prime) throw UnknownSetting("settings b and b' must differ");
}

double correlator(const ConditionalTable& joint, const Value& x, const Value& y) {
    if (joint.target_vars().size() != 2 || !is_pm_one(joint.target_vars()[0]) ||
        !is_pm_one(joint.target_vars()[1]))
        throw ShapeMismatch("correlator needs targets (s1, s2) with supports {+1, -1}");
    std::size_t g;
    try {
        const Value given[] = {x, y};
        g = joint.given_index(given);
    } catch (const Error&) {
        throw UnknownSetting("setting pair (" + to_string(x) + ", " + to_string(y) +
                             ") not present in the joint table");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < joint.target_count(); ++k) {
        auto outcome = joint.target_values(k);
        m += as_sign(outcome[0]) * as_sign(outcome[1]) * joint.at(g, k);
    }
    return m;
}

ChshReport chsh(const ConditionalTable& joint, const SettingsQuad& settings) {
    settings.validate();
    ChshReport r;
    r.settings = settings;
    r.m_ab = correlator(joint, settings.a, settings.b);
    r.m_apb = correlator(joint, settings.a_prime, settings.b);
    r.m_abp = correlator(joint, settings.a, settings.b_prime);
    r.m_apbp = correlator(joint, settings.a_prime, settings.b_prime);
    r.x_bi = r.m_ab + r.m_apb + r.m_abp - r.m_apbp;
    return r;
}

double quantum_correlation(int sigma1, int sigma2, double a, double b) {
    return 0.25 * (1.0 - sigma1 * sigma2 * std::cos(a - b));
}

ConditionalTable quantum_table(const std::vector<double>& x_angles,
                               const std::vector<double>& y_angles) {
    std::vector<Value> xs(x_angles.begin(), x_angles.end());
    std::vector<Value> ys(y_angles.begin(), y_angles.end());
    std::vector<VariableSpec> given = {{"x", xs}, {"y", ys}};
    std::vector<VariableSpec> target = {{"s1", {+1, -1}}, {"s2", {+1, -1}}};
    std::vector<double> entries;
    entries.reserve(xs.size() * ys.size() * 4);
    for (double x : x_angles)
        for (double y : y_angles)
            for (int s1 : {+1, -1})
                for (int s2 : {+1, -1}) entries.push_back(quantum_correlation(s1, s2, x, y));
    return ConditionalTable::make(std::move(given), std::move(target), std::move(entries));
}

std::pair<ChshReport, SettingsQuad> chsh_scan(const ConditionalTable& joint,
                                              const std::vector<SettingsQuad>& grid) {
    if (grid.empty()) throw EmptyGrid("chsh_scan needs a non-empty settings grid");
    ChshReport best = chsh(joint, grid.front());
    SettingsQuad argmax = grid.front();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        ChshReport r = chsh(joint, grid[i]);
        if (std::abs(r.x_bi) > std::abs(best.x_bi)) {
            best = r;
            argmax = grid[i];
        }
    }
    return {best, argmax};
}

} // namespace bellforge
