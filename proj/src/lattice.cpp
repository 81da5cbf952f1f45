#include "bellforge/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <thread>

namespace bellforge {

namespace {

int spin(std::uint32_t config, std::size_t node) {
    return (config >> node) & 1u ? +1 : -1;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (workers <= 1 || count < (1u << 16)) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        if (lo >= count) break;
        std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back([&body, lo, hi]() { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace

std::size_t worker_count() {
    if (const char* env = std::getenv("BELLFORGE_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

std::size_t SpinLattice::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == id) return i;
    throw UnknownVariable("no lattice node named " + id);
}

std::vector<std::size_t> SpinLattice::hidden_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (i != roles.s1 && i != roles.s2 && i != roles.a && i != roles.b) out.push_back(i);
    return out;
}

void SpinLattice::validate() const {
    if (nodes.empty()) throw ShapeMismatch("lattice has no nodes");
    if (nodes.size() > kMaxSpins)
        throw TooManySpins("lattice has " + std::to_string(nodes.size()) +
                           " nodes, enumeration bound is " + std::to_string(kMaxSpins));
    if (fields.size() != nodes.size())
        throw ShapeMismatch("lattice needs one field value per node");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw RangeError("beta must be positive");
    std::set<std::string> ids(nodes.begin(), nodes.end());
    if (ids.size() != nodes.size()) throw ShapeMismatch("duplicate node identifiers");

    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& e : edges) {
        if (e.i >= nodes.size() || e.j >= nodes.size())
            throw ShapeMismatch("edge references a missing node");
        if (e.i == e.j) throw ShapeMismatch("self-loop on node " + nodes[e.i]);
        if (!std::isfinite(e.coupling)) throw RangeError("non-finite coupling");
        auto key = std::minmax(e.i, e.j);
        if (!pairs.insert({key.first, key.second}).second)
            throw ShapeMismatch("duplicate edge " + nodes[e.i] + "-" + nodes[e.j]);
    }
    for (double h : fields)
        if (!std::isfinite(h)) throw RangeError("non-finite field");

    std::size_t role_ids[] = {roles.s1, roles.s2, roles.a, roles.b};
    std::set<std::size_t> distinct(std::begin(role_ids), std::end(role_ids));
    if (distinct.size() != 4) throw ShapeMismatch("the four role nodes must be distinct");
    for (std::size_t r : role_ids)
        if (r >= nodes.size()) throw ShapeMismatch("role references a missing node");
}

SpinLattice ladder10(double coupling, double beta) {
    SpinLattice lat;
    lat.nodes = {"a", "b", "1", "2", "3", "4", "5", "6", "7", "8"};
    lat.fields.assign(10, 0.0);
    lat.beta = beta;
    auto at = [&lat](const char* id) { return lat.node_index(id); };
    const std::pair<const char*, const char*> links[] = {
        // top rail 1-3-4-5-2
        {"1", "3"}, {"3", "4"}, {"4", "5"}, {"5", "2"},
        // bottom rail a-6-7-8-b
        {"a", "6"}, {"6", "7"}, {"7", "8"}, {"8", "b"},
        // rungs
        {"1", "a"}, {"3", "6"}, {"4", "7"}, {"5", "8"}, {"2", "b"},
    };
    for (const auto& [u, v] : links) lat.edges.push_back({at(u), at(v), coupling});
    lat.roles = {at("1"), at("2"), at("a"), at("b")};
    return lat;
}

SpinLattice hexagon6(const std::vector<std::string>& arrangement, double coupling,
                     double beta) {
    if (arrangement.size() != 6)
        throw BadArrangement("hexagon arrangement needs exactly 6 nodes");
    std::set<std::string> ids(arrangement.begin(), arrangement.end());
    if (ids.size() != 6) throw BadArrangement("hexagon arrangement repeats a node");
    for (const char* required : {"1", "2", "a", "b"})
        if (!ids.count(required))
            throw BadArrangement(std::string("hexagon arrangement must contain node ") +
                                 required);
    SpinLattice lat;
    lat.nodes = arrangement;
    lat.fields.assign(6, 0.0);
    lat.beta = beta;
    for (std::size_t i = 0; i < 6; ++i) lat.edges.push_back({i, (i + 1) % 6, coupling});
    lat.roles = {lat.node_index("1"), lat.node_index("2"), lat.node_index("a"),
                 lat.node_index("b")};
    return lat;
}

double hamiltonian(const SpinLattice& lattice, std::uint32_t config) {
    const std::size_t n = lattice.nodes.size();
    if (n < 32 && config >= (1u << n))
        throw ShapeMismatch("configuration has bits beyond the node count");
    double h = 0.0;
    for (const auto& e : lattice.edges) h -= e.coupling * spin(config, e.i) * spin(config, e.j);
    for (std::size_t i = 0; i < n; ++i) h -= lattice.fields[i] * spin(config, i);
    return h;
}

std::vector<double> boltzmann_joint(const SpinLattice& lattice) {
    lattice.validate();
    const std::size_t n = lattice.nodes.size();
    const std::size_t count = std::size_t{1} << n;
    const std::size_t workers = worker_count();

    std::vector<double> p(count);
    std::vector<double> range_min(workers, std::numeric_limits<double>::infinity());
    {
        std::size_t chunk = (count + workers - 1) / workers;
        parallel_for(count, workers, [&](std::size_t lo, std::size_t hi) {
            std::size_t w = lo / chunk;
            double local_min = std::numeric_limits<double>::infinity();
            for (std::size_t c = lo; c < hi; ++c) {
                double e = hamiltonian(lattice, static_cast<std::uint32_t>(c));
                p[c] = e;
                local_min = std::min(local_min, e);
            }
            range_min[std::min(w, workers - 1)] = local_min;
        });
    }
    double min_e = *std::min_element(range_min.begin(), range_min.end());

    parallel_for(count, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) p[c] = std::exp(-lattice.beta * (p[c] - min_e));
    });

    // Sequential summation in config order: bit-reproducible for any worker count.
    double z = 0.0;
    for (double w : p) z += w;
    for (double& w : p) w /= z;
    return p;
}

ConditionalTable bell_conditional(const SpinLattice& lattice) {
    auto joint = boltzmann_joint(lattice);
    auto bit = [](int s) { return s == +1 ? 0u : 1u; }; // support order {+1, -1}
    double cells[4][4] = {};
    for (std::size_t c = 0; c < joint.size(); ++c) {
        auto cfg = static_cast<std::uint32_t>(c);
        std::size_t row = bit(spin(cfg, lattice.roles.a)) * 2 + bit(spin(cfg, lattice.roles.b));
        std::size_t col =
            bit(spin(cfg, lattice.roles.s1)) * 2 + bit(spin(cfg, lattice.roles.s2));
        cells[row][col] += joint[c];
    }
    std::vector<double> entries;
    entries.reserve(16);
    for (auto& row : cells) {
        double mass = row[0] + row[1] + row[2] + row[3];
        for (double v : row) entries.push_back(v / mass);
    }
    return ConditionalTable::make({{"x", {+1, -1}}, {"y", {+1, -1}}},
                                  {{"s1", {+1, -1}}, {"s2", {+1, -1}}}, std::move(entries));
}

ChshReport lattice_chsh(const SpinLattice& lattice) {
    return chsh(bell_conditional(lattice), SettingsQuad{+1, -1, +1, -1});
}

ConditionalTable closed_form_ladder(double K) {
    if (!(std::abs(K) < 1.0)) throw RangeError("K = tanh(beta J) must lie in (-1, 1)");
    const double K3 = K * K * K, K4 = K3 * K, K5 = K4 * K, K6 = K5 * K, K7 = K6 * K,
                 K8 = K7 * K, K10 = K8 * K * K;
    auto numerator = [&](int s1, int s2, int sa, int sb) {
        double bracket = 1.0 + (K3 + K5 + 2 * K7) * (s1 * sa + s2 * sb) +
                         (K4 + 3 * K6) * (s1 * s2 + sa * sb) +
                         (K6 + 3 * K8) * (s1 * s2 * sa * sb) +
                         (3 * K5 + K7) * (s1 * sb + s2 * sa) + 2 * K4 + K6;
        return (1.0 + K * s1 * sa) * (1.0 + K * s2 * sb) * bracket;
    };
    auto denominator = [&](int sa, int sb) {
        return 4.0 * (1.0 + sa * sb * (K4 + 10 * K6 + 5 * K8) + 4 * K4 + 3 * K6 + 5 * K8 +
                      3 * K10);
    };
    std::vector<double> entries;
    entries.reserve(16);
    for (int sa : {+1, -1})
        for (int sb : {+1, -1}) {
            double d = denominator(sa, sb);
            for (int s1 : {+1, -1})
                for (int s2 : {+1, -1}) entries.push_back(numerator(s1, s2, sa, sb) / d);
        }
    return ConditionalTable::make({{"x", {+1, -1}}, {"y", {+1, -1}}},
                                  {{"s1", {+1, -1}}, {"s2", {+1, -1}}}, std::move(entries));
}

namespace {

std::vector<std::size_t> resolve_group(const SpinLattice& lattice,
                                       const std::vector<std::string>& ids) {
    std::vector<std::size_t> out;
    for (const auto& id : ids) {
        std::size_t k;
        try {
            k = lattice.node_index(id);
        } catch (const Error&) {
            throw PartitionError("group node " + id + " is not a lattice node");
        }
        out.push_back(k);
    }
    return out;
}

std::vector<Value> bitmask_support(std::size_t bits) {
    std::vector<Value> support;
    for (std::size_t v = 0; v < (std::size_t{1} << bits); ++v)
        support.push_back(static_cast<int>(v));
    return support;
}

std::size_t group_value(std::uint32_t config, const std::vector<std::size_t>& group) {
    std::size_t v = 0;
    for (std::size_t k = 0; k < group.size(); ++k)
        if ((config >> group[k]) & 1u) v |= std::size_t{1} << k;
    return v;
}

} // namespace

HiddenVariableModel lattice_as_hv_model(const SpinLattice& lattice,
                                        const std::vector<std::string>& l0_nodes,
                                        const std::vector<std::string>& l1_nodes,
                                        const std::vector<std::string>& l2_nodes) {
    lattice.validate();
    auto g0 = resolve_group(lattice, l0_nodes);
    auto g1 = resolve_group(lattice, l1_nodes);
    auto g2 = resolve_group(lattice, l2_nodes);

    auto hidden = lattice.hidden_nodes();
    std::set<std::size_t> hidden_set(hidden.begin(), hidden.end());
    std::set<std::size_t> seen;
    for (const auto* group : {&g0, &g1, &g2})
        for (std::size_t k : *group) {
            if (!hidden_set.count(k))
                throw PartitionError("node " + lattice.nodes[k] + " has a role, not hidden");
            if (!seen.insert(k).second)
                throw PartitionError("node " + lattice.nodes[k] + " appears in two groups");
        }

    const std::size_t n0 = std::size_t{1} << g0.size();
    const std::size_t n1 = std::size_t{1} << g1.size();
    const std::size_t n2 = std::size_t{1} << g2.size();

    // acc is P(x, y, l0, l1, l2, s1, s2), settings uniform over the 4 rows.
    auto joint = boltzmann_joint(lattice);
    auto bit = [](int s) { return s == +1 ? std::size_t{0} : std::size_t{1}; };
    std::vector<double> acc(4 * n0 * n1 * n2 * 4, 0.0);
    for (std::size_t c = 0; c < joint.size(); ++c) {
        auto cfg = static_cast<std::uint32_t>(c);
        std::size_t row = bit(spin(cfg, lattice.roles.a)) * 2 + bit(spin(cfg, lattice.roles.b));
        std::size_t idx = row;
        idx = idx * n0 + group_value(cfg, g0);
        idx = idx * n1 + group_value(cfg, g1);
        idx = idx * n2 + group_value(cfg, g2);
        idx = idx * 4 + bit(spin(cfg, lattice.roles.s1)) * 2 + bit(spin(cfg, lattice.roles.s2));
        acc[idx] += joint[c];
    }
    // Convert the per-row mass into a conditional on the setting pair.
    std::vector<double> row_mass(4, 0.0);
    const std::size_t per_row = n0 * n1 * n2 * 4;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < per_row; ++k) row_mass[r] += acc[r * per_row + k];
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < per_row; ++k) acc[r * per_row + k] /= row_mass[r];

    auto cell = [&](std::size_t r, std::size_t i0, std::size_t i1, std::size_t i2,
                    std::size_t is1, std::size_t is2) {
        return acc[(((r * n0 + i0) * n1 + i1) * n2 + i2) * 4 + is1 * 2 + is2];
    };

    VariableSpec vx{"x", {+1, -1}};
    VariableSpec vy{"y", {+1, -1}};
    VariableSpec v0{"l0", bitmask_support(g0.size())};
    VariableSpec v1{"l1", bitmask_support(g1.size())};
    VariableSpec v2{"l2", bitmask_support(g2.size())};
    VariableSpec vs1{"s1", {+1, -1}};
    VariableSpec vs2{"s2", {+1, -1}};

    HiddenVariableModel model{
        ConditionalTable::make({}, {vx, vy}, {0.25, 0.25, 0.25, 0.25}),
        // rho0: P(l0 | x, y)
        [&] {
            std::vector<double> e;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t i0 = 0; i0 < n0; ++i0) {
                    double sum = 0.0;
                    for (std::size_t i1 = 0; i1 < n1; ++i1)
                        for (std::size_t i2 = 0; i2 < n2; ++i2)
                            for (std::size_t s = 0; s < 4; ++s)
                                sum += cell(r, i0, i1, i2, s / 2, s % 2);
                    e.push_back(sum);
                }
            return ConditionalTable::make({vx, vy}, {v0}, std::move(e));
        }(),
        // lambda1: P(l1 | x, y, l0)
        [&] {
            std::vector<double> e;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t i0 = 0; i0 < n0; ++i0) {
                    std::vector<double> num(n1, 0.0);
                    double den = 0.0;
                    for (std::size_t i1 = 0; i1 < n1; ++i1)
                        for (std::size_t i2 = 0; i2 < n2; ++i2)
                            for (std::size_t s = 0; s < 4; ++s) {
                                double p = cell(r, i0, i1, i2, s / 2, s % 2);
                                num[i1] += p;
                                den += p;
                            }
                    for (double v : num) e.push_back(v / den);
                }
            return ConditionalTable::make({vx, vy, v0}, {v1}, std::move(e));
        }(),
        // lambda2: P(l2 | x, y, l0, l1)
        [&] {
            std::vector<double> e;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t i0 = 0; i0 < n0; ++i0)
                    for (std::size_t i1 = 0; i1 < n1; ++i1) {
                        std::vector<double> num(n2, 0.0);
                        double den = 0.0;
                        for (std::size_t i2 = 0; i2 < n2; ++i2)
                            for (std::size_t s = 0; s < 4; ++s) {
                                double p = cell(r, i0, i1, i2, s / 2, s % 2);
                                num[i2] += p;
                                den += p;
                            }
                        for (double v : num) e.push_back(v / den);
                    }
            return ConditionalTable::make({vx, vy, v0, v1}, {v2}, std::move(e));
        }(),
        // sigma1: P(s1 | x, y, l0, l1, l2)
        [&] {
            std::vector<double> e;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t i0 = 0; i0 < n0; ++i0)
                    for (std::size_t i1 = 0; i1 < n1; ++i1)
                        for (std::size_t i2 = 0; i2 < n2; ++i2) {
                            double plus = cell(r, i0, i1, i2, 0, 0) + cell(r, i0, i1, i2, 0, 1);
                            double minus = cell(r, i0, i1, i2, 1, 0) + cell(r, i0, i1, i2, 1, 1);
                            double den = plus + minus;
                            e.push_back(plus / den);
                            e.push_back(minus / den);
                        }
            return ConditionalTable::make({vx, vy, v0, v1, v2}, {vs1}, std::move(e));
        }(),
        // sigma2: P(s2 | x, y, l0, l1, l2, s1)
        [&] {
            std::vector<double> e;
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t i0 = 0; i0 < n0; ++i0)
                    for (std::size_t i1 = 0; i1 < n1; ++i1)
                        for (std::size_t i2 = 0; i2 < n2; ++i2)
                            for (std::size_t is1 = 0; is1 < 2; ++is1) {
                                double plus = cell(r, i0, i1, i2, is1, 0);
                                double minus = cell(r, i0, i1, i2, is1, 1);
                                double den = plus + minus;
                                e.push_back(plus / den);
                                e.push_back(minus / den);
                            }
            return ConditionalTable::make({vx, vy, v0, v1, v2, vs1}, {vs2}, std::move(e));
        }(),
    };
    return model;
}

} // namespace bellforge
