#include "bellforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace bellforge {

namespace {

bool givens_within(const ConditionalTable& t, const std::set<std::string>& allowed) {
    for (const auto& v : t.given_vars())
        if (!allowed.contains(v.name)) return false;
    return true;
}

void require_target(const ConditionalTable& t, const std::string& name,
                    const std::string& table_name) {
    if (t.target_vars().size() != 1 || t.target_vars()[0].name != name)
        throw ComposeError("table " + table_name + " must have the single target " + name);
}

// Evaluates one component table at a full (x, y, s1, s2, l0, l1, l2)
// assignment by pulling out the variables it conditions on.
struct TableSlot {
    const ConditionalTable* table;
    std::vector<std::size_t> given_sources; // positions into the env vector
    std::size_t target_source;

    double eval(std::span<const Value> env) const {
        std::vector<Value> given;
        given.reserve(given_sources.size());
        for (std::size_t src : given_sources) given.push_back(env[src]);
        const Value target[] = {env[target_source]};
        return table->prob(given, target);
    }
};

} // namespace

bool HiddenVariableModel::strict_background_shape() const {
    auto names = [](const ConditionalTable& t) {
        std::set<std::string> out;
        for (const auto& v : t.given_vars()) out.insert(v.name);
        return out;
    };
    return names(rho0).empty() && givens_within(lambda1, {"l0", "x"}) &&
           givens_within(lambda2, {"l0", "l1", "y"}) && givens_within(sigma1, {"l0", "l1", "x"}) &&
           givens_within(sigma2, {"s1", "l0", "l2", "y"});
}

void HiddenVariableModel::validate_shape() const {
    if (setting_dist.target_vars().size() != 2 || setting_dist.target_vars()[0].name != "x" ||
        setting_dist.target_vars()[1].name != "y" || !setting_dist.given_vars().empty())
        throw ComposeError("setting distribution must be an unconditional table over (x, y)");
    require_target(rho0, "l0", "rho0");
    require_target(lambda1, "l1", "lambda1");
    require_target(lambda2, "l2", "lambda2");
    require_target(sigma1, "s1", "sigma1");
    require_target(sigma2, "s2", "sigma2");
    if (!givens_within(rho0, {"x", "y"}))
        throw ComposeError("rho0 may condition on settings only");
    if (!givens_within(lambda1, {"l0", "x", "y"}))
        throw ComposeError("lambda1 conditions on variables outside {l0, x, y}");
    if (!givens_within(lambda2, {"l0", "l1", "x", "y"}))
        throw ComposeError("lambda2 conditions on variables outside {l0, l1, x, y}");
    if (!givens_within(sigma1, {"l0", "l1", "l2", "x", "y"}))
        throw ComposeError("sigma1 conditions on variables outside {l0, l1, l2, x, y}");
    if (!givens_within(sigma2, {"s1", "l0", "l1", "l2", "x", "y"}))
        throw ComposeError("sigma2 conditions on variables outside {s1, l0, l1, l2, x, y}");
    for (const auto& spec :
         {sigma1.target_vars()[0], sigma2.target_vars()[0]})
        if (spec.support != std::vector<Value>{+1, -1})
            throw ComposeError("outcome variable " + spec.name + " must have support {+1, -1}");
}

std::vector<NormalizationResidual> validate(const HiddenVariableModel& model) {
    std::vector<NormalizationResidual> out;
    auto scan = [&](const ConditionalTable& t, const std::string& name) {
        auto residuals = t.row_residuals();
        for (std::size_t g = 0; g < residuals.size(); ++g)
            if (residuals[g] > kNormTolerance)
                out.push_back({name, to_string_row(t, g), residuals[g]});
    };
    scan(model.setting_dist, "setting_dist");
    scan(model.rho0, "rho0");
    scan(model.lambda1, "lambda1");
    scan(model.lambda2, "lambda2");
    scan(model.sigma1, "sigma1");
    scan(model.sigma2, "sigma2");
    return out;
}

ConditionalTable compose_full(const HiddenVariableModel& model) {
    model.validate_shape();
    if (!validate(model).empty()) throw ComposeError("model tables are not normalized");

    const VariableSpec& x = model.setting_var_x();
    const VariableSpec& y = model.setting_var_y();
    std::vector<VariableSpec> targets = {model.sigma1.target_vars()[0],
                                         model.sigma2.target_vars()[0],
                                         model.rho0.target_vars()[0],
                                         model.lambda1.target_vars()[0],
                                         model.lambda2.target_vars()[0]};
    std::vector<VariableSpec> givens = {x, y};

    // env layout: x, y, s1, s2, l0, l1, l2
    auto slot_for = [&](const ConditionalTable& t, std::size_t target_source) {
        TableSlot slot{&t, {}, target_source};
        for (const auto& v : t.given_vars()) {
            if (v.name == "x") slot.given_sources.push_back(0);
            else if (v.name == "y") slot.given_sources.push_back(1);
            else if (v.name == "s1") slot.given_sources.push_back(2);
            else if (v.name == "s2") slot.given_sources.push_back(3);
            else if (v.name == "l0") slot.given_sources.push_back(4);
            else if (v.name == "l1") slot.given_sources.push_back(5);
            else if (v.name == "l2") slot.given_sources.push_back(6);
            else throw ComposeError("unexpected given variable " + v.name);
        }
        return slot;
    };
    const TableSlot slots[] = {slot_for(model.rho0, 4), slot_for(model.lambda1, 5),
                               slot_for(model.lambda2, 6), slot_for(model.sigma1, 2),
                               slot_for(model.sigma2, 3)};

    std::size_t target_size = 1;
    for (const auto& v : targets) target_size *= v.support.size();
    std::size_t given_size = x.support.size() * y.support.size();

    std::vector<double> entries(given_size * target_size);
    std::vector<Value> env(7);
    std::size_t flat = 0;
    for (const Value& xv : x.support) {
        for (const Value& yv : y.support) {
            env[0] = xv;
            env[1] = yv;
            for (const Value& s1 : targets[0].support)
                for (const Value& s2 : targets[1].support)
                    for (const Value& l0 : targets[2].support)
                        for (const Value& l1 : targets[3].support)
                            for (const Value& l2 : targets[4].support) {
                                env[2] = s1;
                                env[3] = s2;
                                env[4] = l0;
                                env[5] = l1;
                                env[6] = l2;
                                double p = 1.0;
                                for (const auto& slot : slots) p *= slot.eval(env);
                                entries[flat++] = p;
                            }
        }
    }
    return ConditionalTable::make(std::move(givens), std::move(targets), std::move(entries));
}

ConditionalTable compose_bb(const HiddenVariableModel& model) {
    return compose_full(model).marginalize({"l0", "l1", "l2"});
}

ConditionalTable compose_local(const ConditionalTable& rho, const ConditionalTable& response1,
                               const ConditionalTable& response2) {
    return compose_bb(local_as_model(rho, response1, response2));
}

HiddenVariableModel local_as_model(const ConditionalTable& rho, const ConditionalTable& response1,
                                   const ConditionalTable& response2) {
    if (!rho.given_vars().empty() || rho.target_vars().size() != 1 ||
        rho.target_vars()[0].name != "l")
        throw ComposeError("rho must be an unconditional table over l");
    auto check_response = [](const ConditionalTable& t, const std::string& setting,
                             const std::string& outcome) {
        if (t.given_vars().size() != 2 || t.given_vars()[0].name != setting ||
            t.given_vars()[1].name != "l" || t.target_vars().size() != 1 ||
            t.target_vars()[0].name != outcome)
            throw ComposeError("response table must be P(" + outcome + " | " + setting + ", l)");
    };
    check_response(response1, "x", "s1");
    check_response(response2, "y", "s2");

    const VariableSpec x = response1.given_vars()[0];
    const VariableSpec y = response2.given_vars()[0];
    const VariableSpec lambda = rho.target_vars()[0];

    std::vector<double> uniform(x.support.size() * y.support.size(),
                                1.0 / double(x.support.size() * y.support.size()));

    // Re-lay the response entries for the (l0, setting) given order.
    auto relay = [](const ConditionalTable& src, const VariableSpec& setting,
                    const VariableSpec& lambda_spec, const std::string& outcome) {
        std::vector<double> entries;
        entries.reserve(lambda_spec.support.size() * setting.support.size() * 2);
        for (const Value& lv : lambda_spec.support)
            for (const Value& sv : setting.support)
                for (const Value& ov : src.target_vars()[0].support) {
                    const Value given[] = {sv, lv};
                    const Value target[] = {ov};
                    entries.push_back(src.prob(given, target));
                }
        return ConditionalTable::make({{"l0", lambda_spec.support}, setting},
                                      {{outcome, src.target_vars()[0].support}},
                                      std::move(entries));
    };
    return {
        ConditionalTable::make({}, {x, y}, std::move(uniform)),
        // lambda lives in the l0 slot; l1 and l2 are singletons.
        ConditionalTable::make({}, {{"l0", lambda.support}}, rho.entries()),
        ConditionalTable::make({}, {{"l1", {0}}}, {1.0}),
        ConditionalTable::make({}, {{"l2", {0}}}, {1.0}),
        relay(response1, x, lambda, "s1"),
        relay(response2, y, lambda, "s2"),
    };
}

HiddenVariableModel bb1() {
    VariableSpec x{"x", {std::string("a"), std::string("a'")}};
    VariableSpec y{"y", {std::string("b"), std::string("b'")}};
    VariableSpec l0{"l0", {0}};
    VariableSpec l1{"l1", {1, 2}};
    VariableSpec l2{"l2", {1, 2}};
    VariableSpec s1{"s1", {+1, -1}};
    VariableSpec s2{"s2", {+1, -1}};

    auto settings = ConditionalTable::make({}, {x, y}, {0.25, 0.25, 0.25, 0.25});
    auto rho0 = ConditionalTable::make({}, {l0}, {1.0});
    // P(l1 = 1 | x) = 0.5 for both settings.
    auto lambda1 = ConditionalTable::make({x}, {l1}, {0.5, 0.5, 0.5, 0.5});
    // P(l2 = 1 | l1, y): y = b forces l2 = 1; y = b' copies l1 into l2's
    // complement (l1=1 -> l2=2, l1=2 -> l2=1).
    auto lambda2 = ConditionalTable::make({l1, y}, {l2},
                                          {
                                              1.0, 0.0, // l1=1, b
                                              0.0, 1.0, // l1=1, b'
                                              1.0, 0.0, // l1=2, b
                                              1.0, 0.0, // l1=2, b'
                                          });
    // P(s1 = +1 | l1, x): deterministic sign flip between a and a'.
    auto sigma1 = ConditionalTable::make({l1, x}, {s1},
                                         {
                                             1.0, 0.0, // l1=1, a
                                             0.0, 1.0, // l1=1, a'
                                             0.0, 1.0, // l1=2, a
                                             1.0, 0.0, // l1=2, a'
                                         });
    // P(s2 = +1 | s1, l2, y).
    auto sigma2 = ConditionalTable::make({s1, l2, y}, {s2},
                                         {
                                             1.0, 0.0, // s1=+1, l2=1, b
                                             0.0, 1.0, // s1=+1, l2=1, b'
                                             1.0, 0.0, // s1=+1, l2=2, b
                                             1.0, 0.0, // s1=+1, l2=2, b'
                                             0.0, 1.0, // s1=-1, l2=1, b
                                             0.0, 1.0, // s1=-1, l2=1, b'
                                             1.0, 0.0, // s1=-1, l2=2, b
                                             1.0, 0.0, // s1=-1, l2=2, b'
                                         });
    return {std::move(settings), std::move(rho0), std::move(lambda1),
            std::move(lambda2),  std::move(sigma1), std::move(sigma2)};
}

double canonical_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(radians, two_pi);
    if (a < 0.0) a += two_pi;
    if (a == two_pi) a = 0.0;
    return a;
}

HiddenVariableModel dilorenzo(const SettingsQuad& settings) {
    settings.validate();
    const double ax = std::get<double>(settings.a);
    const double axp = std::get<double>(settings.a_prime);
    const double by = std::get<double>(settings.b);
    const double byp = std::get<double>(settings.b_prime);
    constexpr double pi = std::numbers::pi;

    // Eight raw atoms: each setting direction and its opposite. Dedupe into
    // one shared angle list so the lambda2 point mass can reference its
    // partner value bit-exactly.
    std::vector<double> raw = {ax, ax + pi, axp, axp + pi, by, by + pi, byp, byp + pi};
    std::vector<double> atoms;
    std::vector<std::size_t> atom_of_raw(raw.size());
    constexpr double merge_tol = 1e-9;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double c = canonical_angle(raw[i]);
        std::size_t found = atoms.size();
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            double d = std::abs(atoms[k] - c);
            d = std::min(d, 2.0 * pi - d);
            if (d < merge_tol) {
                found = k;
                break;
            }
        }
        if (found == atoms.size()) atoms.push_back(c);
        atom_of_raw[i] = found;
    }
    std::vector<std::size_t> opposite(atoms.size());
    for (std::size_t i = 0; i < raw.size(); i += 2) {
        opposite[atom_of_raw[i]] = atom_of_raw[i + 1];
        opposite[atom_of_raw[i + 1]] = atom_of_raw[i];
    }

    std::vector<Value> atom_values(atoms.begin(), atoms.end());
    VariableSpec x{"x", {ax, axp}};
    VariableSpec y{"y", {by, byp}};
    VariableSpec l0{"l0", {0}};
    VariableSpec l1{"l1", atom_values};
    VariableSpec l2{"l2", atom_values};
    VariableSpec s1{"s1", {+1, -1}};
    VariableSpec s2{"s2", {+1, -1}};

    auto setting_dist = ConditionalTable::make({}, {x, y}, {0.25, 0.25, 0.25, 0.25});
    auto rho0 = ConditionalTable::make({}, {l0}, {1.0});

    // P(l1 | x, y): mass 1/4 on each of {+x, -x, +y, -y}. This is where the
    // model violates measurement independence (and signals at the hidden
    // level): the left atom distribution depends on the remote setting.
    std::vector<double> lambda1_entries(4 * atoms.size(), 0.0);
    std::size_t row = 0;
    for (std::size_t xi = 0; xi < 2; ++xi) {
        for (std::size_t yi = 0; yi < 2; ++yi) {
            std::size_t x_raw = 2 * xi;     // index of +x in raw
            std::size_t y_raw = 4 + 2 * yi; // index of +y in raw
            for (std::size_t r : {x_raw, x_raw + 1, y_raw, y_raw + 1})
                lambda1_entries[row * atoms.size() + atom_of_raw[r]] += 0.25;
            ++row;
        }
    }
    auto lambda1 = ConditionalTable::make({x, y}, {l1}, std::move(lambda1_entries));

    // l2 is the antipode of l1, deterministically.
    std::vector<double> lambda2_entries(atoms.size() * atoms.size(), 0.0);
    for (std::size_t i = 0; i < atoms.size(); ++i)
        lambda2_entries[i * atoms.size() + opposite[i]] = 1.0;
    auto lambda2 = ConditionalTable::make({l1}, {l2}, std::move(lambda2_entries));

    auto response = [&](const VariableSpec& lambda, const VariableSpec& setting,
                        const std::string& outcome) {
        std::vector<double> entries;
        entries.reserve(lambda.support.size() * setting.support.size() * 2);
        for (const Value& lv : lambda.support)
            for (const Value& sv : setting.support) {
                double c = std::cos(std::get<double>(lv) - std::get<double>(sv));
                entries.push_back(0.5 * (1.0 + c));
                entries.push_back(0.5 * (1.0 - c));
            }
        return ConditionalTable::make({lambda, setting},
                                      {{outcome, {+1, -1}}}, std::move(entries));
    };
    auto sigma1 = response(l1, x, "s1");
    auto sigma2 = response(l2, y, "s2");

    return {std::move(setting_dist), std::move(rho0), std::move(lambda1),
            std::move(lambda2),      std::move(sigma1), std::move(sigma2)};
}

HiddenVariableModel random_local_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size_dist(2, 8);
    std::exponential_distribution<double> gamma1(1.0);

    int lambda_size = size_dist(rng);
    std::vector<Value> lambda_support;
    for (int i = 0; i < lambda_size; ++i) lambda_support.push_back(i);

    auto dirichlet_row = [&](std::size_t n) {
        std::vector<double> row(n);
        double sum = 0.0;
        for (double& v : row) {
            v = gamma1(rng);
            sum += v;
        }
        for (double& v : row) v /= sum;
        return row;
    };

    VariableSpec x{"x", {std::string("a"), std::string("a'")}};
    VariableSpec y{"y", {std::string("b"), std::string("b'")}};
    VariableSpec lambda{"l", lambda_support};

    auto rho = ConditionalTable::make({}, {lambda}, dirichlet_row(lambda_size));
    auto response = [&](const VariableSpec& setting, const std::string& outcome) {
        std::vector<double> entries;
        for (std::size_t g = 0; g < setting.support.size() * lambda_support.size(); ++g) {
            auto row = dirichlet_row(2);
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return ConditionalTable::make({setting, lambda}, {{outcome, {+1, -1}}},
                                      std::move(entries));
    };
    return local_as_model(rho, response(x, "s1"), response(y, "s2"));
}

} // namespace bellforge
