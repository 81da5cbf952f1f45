#include "bellforge/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>

namespace bellforge {

namespace {

// Target variable positions in the joint produced by compose_full.
enum : std::size_t { S1 = 0, S2 = 1, L0 = 2, L1 = 3, L2 = 4 };

struct JointView {
    ConditionalTable joint; // targets (s1, s2, l0, l1, l2), givens (x, y)
    std::array<std::size_t, 5> radix{};
    std::vector<std::array<std::uint32_t, 5>> decoded; // per target index
    std::vector<double> setting_weight;                // P(x, y) per given row

    explicit JointView(const HiddenVariableModel& model)
        : joint(compose_full(model)) {
        for (std::size_t v = 0; v < 5; ++v) radix[v] = joint.target_vars()[v].support.size();
        decoded.resize(joint.target_count());
        for (std::size_t k = 0; k < joint.target_count(); ++k) {
            std::size_t rest = k;
            for (std::size_t v = 5; v-- > 0;) {
                decoded[k][v] = static_cast<std::uint32_t>(rest % radix[v]);
                rest /= radix[v];
            }
        }
        setting_weight = model.setting_dist.entries();
    }

    const Value& value(std::size_t var, std::size_t support_index) const {
        return joint.target_vars()[var].support[support_index];
    }
};

using Fixed = std::vector<std::pair<std::size_t, std::size_t>>; // (var, support index)

struct Dist {
    std::vector<double> p; // normalized, mixed-radix over `out` vars
    double mass = 0.0;
};

Dist conditional_dist(const JointView& view, std::size_t g, const Fixed& fixed,
                      std::span<const std::size_t> out) {
    std::size_t out_size = 1;
    for (std::size_t v : out) out_size *= view.radix[v];
    Dist d;
    d.p.assign(out_size, 0.0);
    for (std::size_t k = 0; k < view.joint.target_count(); ++k) {
        const auto& dec = view.decoded[k];
        bool match = true;
        for (const auto& [var, idx] : fixed)
            if (dec[var] != idx) {
                match = false;
                break;
            }
        if (!match) continue;
        std::size_t oi = 0;
        for (std::size_t v : out) oi = oi * view.radix[v] + dec[v];
        double p = view.joint.at(g, k);
        d.p[oi] += p;
        d.mass += p;
    }
    if (d.mass >= kZeroMass)
        for (double& p : d.p) p /= d.mass;
    return d;
}

std::vector<Binding> setting_bindings(const JointView& view, std::size_t g) {
    auto values = view.joint.given_values(g);
    return {{"x", values[0]}, {"y", values[1]}};
}

const char* var_name(std::size_t var) {
    switch (var) {
        case S1: return "s1";
        case S2: return "s2";
        case L0: return "l0";
        case L1: return "l1";
        default: return "l2";
    }
}

void bind_fixed(std::vector<Binding>& witness, const JointView& view, const Fixed& fixed) {
    for (const auto& [var, idx] : fixed) witness.emplace_back(var_name(var), view.value(var, idx));
}

CheckVerdict finish(std::string id, double max_dev, std::vector<Binding> witness,
                    double tolerance, std::size_t skipped, std::function<double()> recheck) {
    CheckVerdict v;
    v.condition_id = std::move(id);
    v.max_deviation = max_dev;
    v.witness = std::move(witness);
    v.tolerance = tolerance;
    v.satisfied = max_dev <= tolerance;
    v.skipped = skipped;
    v.recheck = std::move(recheck);
    return v;
}

// Enumerates the conditioning states (l0, own-wing lambda) for one wing:
// wing 0 conditions on (l0, l1), wing 1 on (l0, l2). The remote wing's
// background variable is marginalized out, matching how each wing's
// response is screened in the assembly.
std::vector<Fixed> wing_lambda_states(const JointView& view, int wing) {
    const std::size_t own = wing == 0 ? L1 : L2;
    std::vector<Fixed> states;
    for (std::size_t i0 = 0; i0 < view.radix[L0]; ++i0)
        for (std::size_t io = 0; io < view.radix[own]; ++io)
            states.push_back({{L0, i0}, {own, io}});
    return states;
}

} // namespace

CheckVerdict check_oi(const HiddenVariableModel& model, double tolerance) {
    auto view = std::make_shared<JointView>(model);
    double max_dev = 0.0;
    std::vector<Binding> witness;
    std::size_t skipped = 0;
    std::function<double()> recheck;

    for (int wing = 0; wing < 2; ++wing) {
        const std::size_t outv = wing == 0 ? S1 : S2;
        const std::size_t other = wing == 0 ? S2 : S1;
        const std::size_t out[] = {outv};
        for (std::size_t g = 0; g < view->joint.given_count(); ++g)
            for (const Fixed& lam : wing_lambda_states(*view, wing)) {
                Dist base = conditional_dist(*view, g, lam, out);
                if (base.mass < kZeroMass) {
                    ++skipped;
                    continue;
                }
                for (std::size_t io = 0; io < view->radix[other]; ++io) {
                    Fixed cond = lam;
                    cond.emplace_back(other, io);
                    Dist with_other = conditional_dist(*view, g, cond, out);
                    if (with_other.mass < kZeroMass) {
                        ++skipped;
                        continue;
                    }
                    double dev = total_variation(with_other.p, base.p);
                    if (dev > max_dev) {
                        max_dev = dev;
                        witness = setting_bindings(*view, g);
                        bind_fixed(witness, *view, cond);
                        recheck = [view, g, lam, cond, outv]() {
                            const std::size_t out_vars[] = {outv};
                            Dist b = conditional_dist(*view, g, lam, out_vars);
                            Dist c = conditional_dist(*view, g, cond, out_vars);
                            return total_variation(c.p, b.p);
                        };
                    }
                }
            }
    }
    return finish("OI", max_dev, std::move(witness), tolerance, skipped, std::move(recheck));
}

CheckVerdict check_pi(const HiddenVariableModel& model, double tolerance) {
    auto view = std::make_shared<JointView>(model);
    double max_dev = 0.0;
    std::vector<Binding> witness;
    std::size_t skipped = 0;
    std::function<double()> recheck;

    const std::size_t nx = model.setting_var_x().support.size();
    const std::size_t ny = model.setting_var_y().support.size();
    auto row = [ny](std::size_t xi, std::size_t yi) { return xi * ny + yi; };

    // wing 0: vary y at fixed x, outcome s1, condition on (l0, l1).
    // wing 1: vary x at fixed y, outcome s2, condition on (l0, l2).
    for (int wing = 0; wing < 2; ++wing) {
        const std::size_t outv = wing == 0 ? S1 : S2;
        const std::size_t out[] = {outv};
        const std::size_t n_local = wing == 0 ? nx : ny;
        const std::size_t n_remote = wing == 0 ? ny : nx;
        for (std::size_t local = 0; local < n_local; ++local)
            for (std::size_t r1 = 0; r1 < n_remote; ++r1)
                for (std::size_t r2 = r1 + 1; r2 < n_remote; ++r2) {
                    std::size_t ga = wing == 0 ? row(local, r1) : row(r1, local);
                    std::size_t gb = wing == 0 ? row(local, r2) : row(r2, local);
                    for (const Fixed& lam : wing_lambda_states(*view, wing)) {
                        Dist da = conditional_dist(*view, ga, lam, out);
                        Dist db = conditional_dist(*view, gb, lam, out);
                        if (da.mass < kZeroMass || db.mass < kZeroMass) {
                            ++skipped;
                            continue;
                        }
                        double dev = total_variation(da.p, db.p);
                        if (dev > max_dev) {
                            max_dev = dev;
                            witness = setting_bindings(*view, ga);
                            auto other = setting_bindings(*view, gb);
                            witness.emplace_back(wing == 0 ? "y'" : "x'",
                                                 other[wing == 0 ? 1 : 0].second);
                            bind_fixed(witness, *view, lam);
                            recheck = [view, ga, gb, lam, outv]() {
                                const std::size_t out_vars[] = {outv};
                                Dist a = conditional_dist(*view, ga, lam, out_vars);
                                Dist b = conditional_dist(*view, gb, lam, out_vars);
                                return total_variation(a.p, b.p);
                            };
                        }
                    }
                }
    }
    return finish("PI", max_dev, std::move(witness), tolerance, skipped, std::move(recheck));
}

CheckVerdict check_mi(const HiddenVariableModel& model, double tolerance) {
    auto view = std::make_shared<JointView>(model);
    const std::size_t out[] = {L0, L1, L2};
    const std::size_t rows = view->joint.given_count();

    std::vector<Dist> marginals(rows);
    for (std::size_t g = 0; g < rows; ++g) marginals[g] = conditional_dist(*view, g, {}, out);

    // Pooled marginal, weighted by the setting distribution.
    std::vector<double> pooled(marginals[0].p.size(), 0.0);
    for (std::size_t g = 0; g < rows; ++g)
        for (std::size_t i = 0; i < pooled.size(); ++i)
            pooled[i] += view->setting_weight[g] * marginals[g].p[i];

    double max_dev = 0.0;
    std::vector<Binding> witness;
    std::function<double()> recheck;
    auto consider = [&](double dev, std::size_t ga, long gb) {
        if (dev > max_dev) {
            max_dev = dev;
            witness = setting_bindings(*view, ga);
            if (gb >= 0) {
                auto other = setting_bindings(*view, static_cast<std::size_t>(gb));
                witness.emplace_back("x'", other[0].second);
                witness.emplace_back("y'", other[1].second);
            } else {
                witness.emplace_back("versus", std::string("pooled"));
            }
            recheck = [view, ga, gb]() {
                const std::size_t out_vars[] = {L0, L1, L2};
                Dist a = conditional_dist(*view, ga, {}, out_vars);
                if (gb >= 0) {
                    Dist b = conditional_dist(*view, static_cast<std::size_t>(gb), {}, out_vars);
                    return total_variation(a.p, b.p);
                }
                std::vector<double> pool(a.p.size(), 0.0);
                for (std::size_t g = 0; g < view->joint.given_count(); ++g) {
                    Dist d = conditional_dist(*view, g, {}, out_vars);
                    for (std::size_t i = 0; i < pool.size(); ++i)
                        pool[i] += view->setting_weight[g] * d.p[i];
                }
                return total_variation(a.p, pool);
            };
        }
    };

    for (std::size_t ga = 0; ga < rows; ++ga) {
        for (std::size_t gb = ga + 1; gb < rows; ++gb)
            consider(total_variation(marginals[ga].p, marginals[gb].p), ga,
                     static_cast<long>(gb));
        consider(total_variation(marginals[ga].p, pooled), ga, -1);
    }
    return finish("MI", max_dev, std::move(witness), tolerance, 0, std::move(recheck));
}

namespace {

// Per-wing outcome factor P(s | local setting, l0, own lambda), pooled over
// the remote setting with the setting-distribution weights. Indexed by
// local setting, then the wing's conditioning state.
std::vector<Dist> pooled_wing_factor(const JointView& view,
                                     const std::vector<double>& setting_weight, int wing,
                                     std::size_t nx, std::size_t ny,
                                     const std::vector<Fixed>& states) {
    auto row = [ny](std::size_t xi, std::size_t yi) { return xi * ny + yi; };
    const std::size_t outv = wing == 0 ? S1 : S2;
    const std::size_t out[] = {outv};
    const std::size_t n_local = wing == 0 ? nx : ny;
    const std::size_t n_remote = wing == 0 ? ny : nx;
    std::vector<Dist> factors(n_local * states.size());
    for (std::size_t local = 0; local < n_local; ++local)
        for (std::size_t s = 0; s < states.size(); ++s) {
            std::vector<double> acc(view.radix[outv], 0.0);
            double mass = 0.0;
            for (std::size_t remote = 0; remote < n_remote; ++remote) {
                std::size_t g = wing == 0 ? row(local, remote) : row(remote, local);
                Dist d = conditional_dist(view, g, states[s], out);
                double w = setting_weight[g] * d.mass;
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * d.p[i];
                mass += w;
            }
            Dist& slot = factors[local * states.size() + s];
            slot.mass = mass;
            if (mass >= kZeroMass) {
                slot.p = std::move(acc);
                for (double& p : slot.p) p /= mass;
            }
        }
    return factors;
}

} // namespace

CheckVerdict check_factorability(const HiddenVariableModel& model, double tolerance) {
    auto view = std::make_shared<JointView>(model);
    const std::size_t nx = model.setting_var_x().support.size();
    const std::size_t ny = model.setting_var_y().support.size();
    auto row = [ny](std::size_t xi, std::size_t yi) { return xi * ny + yi; };

    // Wing conditioning states share l0 enumeration order: the outer index
    // is i0, the inner the wing's own lambda.
    auto states1 = wing_lambda_states(*view, 0);
    auto states2 = wing_lambda_states(*view, 1);
    auto f1 = pooled_wing_factor(*view, view->setting_weight, 0, nx, ny, states1);
    auto f2 = pooled_wing_factor(*view, view->setting_weight, 1, nx, ny, states2);

    double max_dev = 0.0;
    std::vector<Binding> witness;
    std::size_t skipped = 0;
    std::function<double()> recheck;
    const std::size_t out_pair[] = {S1, S2};

    for (std::size_t xi = 0; xi < nx; ++xi)
        for (std::size_t yi = 0; yi < ny; ++yi) {
            std::size_t g = row(xi, yi);
            for (std::size_t i0 = 0; i0 < view->radix[L0]; ++i0)
                for (std::size_t i1 = 0; i1 < view->radix[L1]; ++i1)
                    for (std::size_t i2 = 0; i2 < view->radix[L2]; ++i2) {
                        Fixed lam = {{L0, i0}, {L1, i1}, {L2, i2}};
                        Dist joint = conditional_dist(*view, g, lam, out_pair);
                        if (joint.mass < kZeroMass) {
                            ++skipped;
                            continue;
                        }
                        const Dist& w1 = f1[xi * states1.size() + i0 * view->radix[L1] + i1];
                        const Dist& w2 = f2[yi * states2.size() + i0 * view->radix[L2] + i2];
                        for (std::size_t is1 = 0; is1 < view->radix[S1]; ++is1)
                            for (std::size_t is2 = 0; is2 < view->radix[S2]; ++is2) {
                                double dev = std::abs(joint.p[is1 * view->radix[S2] + is2] -
                                                      w1.p[is1] * w2.p[is2]);
                                if (dev > max_dev) {
                                    max_dev = dev;
                                    witness = setting_bindings(*view, g);
                                    witness.emplace_back("s1", view->value(S1, is1));
                                    witness.emplace_back("s2", view->value(S2, is2));
                                    bind_fixed(witness, *view, lam);
                                    double p1 = w1.p[is1], p2 = w2.p[is2];
                                    recheck = [view, g, lam, is1, is2, p1, p2]() {
                                        const std::size_t out_vars[] = {S1, S2};
                                        Dist j = conditional_dist(*view, g, lam, out_vars);
                                        return std::abs(j.p[is1 * view->radix[S2] + is2] -
                                                        p1 * p2);
                                    };
                                }
                            }
                    }
        }
    return finish("FACT", max_dev, std::move(witness), tolerance, skipped, std::move(recheck));
}

std::vector<CheckVerdict> check_no_signaling(const HiddenVariableModel& model,
                                             double tolerance) {
    auto view = std::make_shared<JointView>(model);
    const std::size_t nx = model.setting_var_x().support.size();
    const std::size_t ny = model.setting_var_y().support.size();
    auto row = [ny](std::size_t xi, std::size_t yi) { return xi * ny + yi; };

    struct Condition {
        std::string id;
        std::vector<std::size_t> out;
        int varied; // 0: remote y varies at fixed x; 1: remote x varies at fixed y
    };
    const std::vector<Condition> conditions = {
        {"NS1", {S1}, 0},     {"NS2", {L1}, 0},     {"NS3", {S1, L1}, 0},
        {"NS4", {S2}, 1},     {"NS5", {L2}, 1},     {"NS6", {S2, L2}, 1},
    };

    std::vector<CheckVerdict> verdicts;
    for (const auto& cond : conditions) {
        double max_dev = 0.0;
        std::vector<Binding> witness;
        std::function<double()> recheck;
        const std::size_t n_local = cond.varied == 0 ? nx : ny;
        const std::size_t n_remote = cond.varied == 0 ? ny : nx;
        for (std::size_t local = 0; local < n_local; ++local)
            for (std::size_t r1 = 0; r1 < n_remote; ++r1)
                for (std::size_t r2 = r1 + 1; r2 < n_remote; ++r2) {
                    std::size_t ga = cond.varied == 0 ? row(local, r1) : row(r1, local);
                    std::size_t gb = cond.varied == 0 ? row(local, r2) : row(r2, local);
                    Dist da = conditional_dist(*view, ga, {}, cond.out);
                    Dist db = conditional_dist(*view, gb, {}, cond.out);
                    double dev = total_variation(da.p, db.p);
                    if (dev > max_dev) {
                        max_dev = dev;
                        witness = setting_bindings(*view, ga);
                        auto other = setting_bindings(*view, gb);
                        witness.emplace_back(cond.varied == 0 ? "y'" : "x'",
                                             other[cond.varied == 0 ? 1 : 0].second);
                        auto out = cond.out;
                        recheck = [view, ga, gb, out]() {
                            Dist a = conditional_dist(*view, ga, {}, out);
                            Dist b = conditional_dist(*view, gb, {}, out);
                            return total_variation(a.p, b.p);
                        };
                    }
                }
        verdicts.push_back(
            finish(cond.id, max_dev, std::move(witness), tolerance, 0, std::move(recheck)));
    }
    return verdicts;
}

CheckVerdict check_screening_off(const HiddenVariableModel& model, double tolerance) {
    auto view = std::make_shared<JointView>(model);
    const std::size_t nx = model.setting_var_x().support.size();
    const std::size_t ny = model.setting_var_y().support.size();
    auto row = [ny](std::size_t xi, std::size_t yi) { return xi * ny + yi; };

    // Pooled one-sided factors: P(l1 | l0, x) over y and P(l2 | l0, y) over x.
    auto pooled_factor = [&](std::size_t out_var, int wing, std::size_t local,
                             std::size_t i0) {
        const std::size_t out[] = {out_var};
        std::vector<double> acc(view->radix[out_var], 0.0);
        double mass = 0.0;
        const std::size_t n_remote = wing == 0 ? ny : nx;
        for (std::size_t remote = 0; remote < n_remote; ++remote) {
            std::size_t g = wing == 0 ? row(local, remote) : row(remote, local);
            Dist d = conditional_dist(*view, g, {{L0, i0}}, out);
            double w = view->setting_weight[g] * d.mass;
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * d.p[i];
            mass += w;
        }
        Dist d;
        d.mass = mass;
        if (mass >= kZeroMass) {
            d.p = std::move(acc);
            for (double& p : d.p) p /= mass;
        }
        return d;
    };

    double max_dev = 0.0;
    std::vector<Binding> witness;
    std::size_t skipped = 0;
    std::function<double()> recheck;
    const std::size_t out_pair[] = {L1, L2};

    for (std::size_t xi = 0; xi < nx; ++xi)
        for (std::size_t yi = 0; yi < ny; ++yi) {
            std::size_t g = row(xi, yi);
            for (std::size_t i0 = 0; i0 < view->radix[L0]; ++i0) {
                Dist joint = conditional_dist(*view, g, {{L0, i0}}, out_pair);
                if (joint.mass < kZeroMass) {
                    ++skipped;
                    continue;
                }
                Dist f1 = pooled_factor(L1, 0, xi, i0);
                Dist f2 = pooled_factor(L2, 1, yi, i0);
                for (std::size_t i1 = 0; i1 < view->radix[L1]; ++i1)
                    for (std::size_t i2 = 0; i2 < view->radix[L2]; ++i2) {
                        double dev = std::abs(joint.p[i1 * view->radix[L2] + i2] -
                                              f1.p[i1] * f2.p[i2]);
                        if (dev > max_dev) {
                            max_dev = dev;
                            witness = setting_bindings(*view, g);
                            witness.emplace_back("l0", view->value(L0, i0));
                            witness.emplace_back("l1", view->value(L1, i1));
                            witness.emplace_back("l2", view->value(L2, i2));
                            double p1 = f1.p[i1], p2 = f2.p[i2];
                            recheck = [view, g, i0, i1, i2, p1, p2]() {
                                const std::size_t out_vars[] = {L1, L2};
                                Dist j = conditional_dist(*view, g, {{L0, i0}}, out_vars);
                                return std::abs(j.p[i1 * view->radix[L2] + i2] - p1 * p2);
                            };
                        }
                    }
            }
        }
    return finish("SCREEN", max_dev, std::move(witness), tolerance, skipped, std::move(recheck));
}

} // namespace bellforge
