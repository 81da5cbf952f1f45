#include "bellforge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <thread>

namespace bellforge {

namespace {

constexpr std::size_t kMaxGridPoints = 100'000'000;

int spin_of(std::uint32_t config, std::size_t node) {
    return (config >> node) & 1u ? +1 : -1;
}

void require_symmetry(bool ok, const std::string& what) {
    if (!ok) throw BadSymmetry(what);
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        return std::numeric_limits<std::size_t>::max();
    return a * b;
}

// Grid-point evaluator. The Boltzmann weight of a configuration factorizes
// over orbits: e^{beta J_k S_k} with S_k the orbit's spin(-pair) sum, so a
// candidate is scored from precomputed per-configuration orbit sums and
// per-(orbit, value) exponential lookup tables instead of re-running the
// full 2^N enumeration. Tables are normalized to a max of 1 per orbit;
// the conditional ratios are invariant under such shifts and the product
// of at most ~20 factors in [e^-300, 1] stays in range.
class Evaluator {
public:
    Evaluator(const SearchSpace& space, const Orbits& orbits) : space_(space) {
        const auto& lat = space.lattice;
        for (const auto& orbit : orbits.field_orbits) sizes_.push_back(orbit.size());
        for (const auto& orbit : orbits.edge_orbits) sizes_.push_back(orbit.size());
        n_field_ = orbits.field_orbits.size();

        const std::size_t count = std::size_t{1} << lat.nodes.size();
        auto bit = [](int s) { return s == +1 ? std::size_t{0} : std::size_t{1}; };
        std::map<std::vector<std::uint8_t>, double> dedup;
        std::vector<std::uint8_t> key(1 + sizes_.size());
        for (std::size_t c = 0; c < count; ++c) {
            auto cfg = static_cast<std::uint32_t>(c);
            key[0] = static_cast<std::uint8_t>(
                (bit(spin_of(cfg, lat.roles.a)) * 2 + bit(spin_of(cfg, lat.roles.b))) * 4 +
                bit(spin_of(cfg, lat.roles.s1)) * 2 + bit(spin_of(cfg, lat.roles.s2)));
            std::size_t k = 0;
            for (const auto& orbit : orbits.field_orbits) {
                int sum = 0;
                for (std::size_t node : orbit) sum += spin_of(cfg, node);
                key[1 + k] = static_cast<std::uint8_t>((sum + int(orbit.size())) / 2);
                ++k;
            }
            for (const auto& orbit : orbits.edge_orbits) {
                int sum = 0;
                for (std::size_t e : orbit)
                    sum += spin_of(cfg, lat.edges[e].i) * spin_of(cfg, lat.edges[e].j);
                key[1 + k] = static_cast<std::uint8_t>((sum + int(orbit.size())) / 2);
                ++k;
            }
            dedup[key] += 1.0;
        }
        for (const auto& [sig, count_] : dedup) {
            cells_.push_back(sig[0]);
            counts_.push_back(count_);
            for (std::size_t k = 0; k < sizes_.size(); ++k) sig_.push_back(sig[1 + k]);
        }

        // tables_[beta][orbit][choice][sum index]
        tables_.resize(space.betas.size());
        for (std::size_t b = 0; b < space.betas.size(); ++b) {
            double beta = space.betas[b];
            tables_[b].resize(sizes_.size());
            for (std::size_t k = 0; k < sizes_.size(); ++k) {
                const auto& values =
                    k < n_field_ ? space.field_values : space.coupling_values;
                tables_[b][k].resize(values.size());
                for (std::size_t v = 0; v < values.size(); ++v) {
                    auto& row = tables_[b][k][v];
                    row.resize(sizes_[k] + 1);
                    double peak = -std::numeric_limits<double>::infinity();
                    for (std::size_t si = 0; si <= sizes_[k]; ++si) {
                        double sum = 2.0 * double(si) - double(sizes_[k]);
                        row[si] = beta * values[v] * sum;
                        peak = std::max(peak, row[si]);
                    }
                    for (double& e : row) e = std::exp(e - peak);
                }
            }
        }
    }

    std::size_t orbit_count() const { return sizes_.size(); }
    std::size_t field_orbit_count() const { return n_field_; }

    double score(std::size_t beta_index, const std::size_t* field_choice,
                 const std::size_t* coupling_choice) const {
        const auto& tab = tables_[beta_index];
        double cells[16] = {};
        const std::size_t n = sizes_.size();
        const std::size_t n_sig = counts_.size();
        for (std::size_t s = 0; s < n_sig; ++s) {
            double w = counts_[s];
            const std::uint8_t* sig = &sig_[s * n];
            for (std::size_t k = 0; k < n_field_; ++k) w *= tab[k][field_choice[k]][sig[k]];
            for (std::size_t k = n_field_; k < n; ++k)
                w *= tab[k][coupling_choice[k - n_field_]][sig[k]];
            cells[cells_[s]] += w;
        }
        return chsh_from_cells(cells);
    }

    double score(const Assignment& a) const {
        return score(a.beta_index, a.field_choice.data(), a.coupling_choice.data());
    }

    // Sequential-sweep state: per-signature running products over orbit
    // prefixes. When the odometer bumps coordinate k, only levels k and
    // beyond need recomputing, which drops the per-point cost from
    // (orbit count) to amortized O(1) table rows per grid point.
    class Scan {
    public:
        Scan(const Evaluator& ev, const Assignment& a)
            : ev_(ev), a_(a), prefix_(ev.sizes_.size() * ev.counts_.size()) {
            rebuild(0);
        }

        void rebuild(std::size_t from_orbit) {
            const std::size_t n = ev_.sizes_.size();
            const std::size_t n_sig = ev_.counts_.size();
            const auto& tab = ev_.tables_[a_.beta_index];
            for (std::size_t k = from_orbit; k < n; ++k) {
                std::size_t choice = k < ev_.n_field_
                                         ? a_.field_choice[k]
                                         : a_.coupling_choice[k - ev_.n_field_];
                const double* factor = tab[k][choice].data();
                double* out = &prefix_[k * n_sig];
                if (k == 0) {
                    for (std::size_t s = 0; s < n_sig; ++s)
                        out[s] = factor[ev_.sig_[s * n + k]];
                } else {
                    const double* prev = &prefix_[(k - 1) * n_sig];
                    for (std::size_t s = 0; s < n_sig; ++s)
                        out[s] = prev[s] * factor[ev_.sig_[s * n + k]];
                }
            }
        }

        double score() const {
            const std::size_t n = ev_.sizes_.size();
            const std::size_t n_sig = ev_.counts_.size();
            const double* last = &prefix_[(n - 1) * n_sig];
            double cells[16] = {};
            for (std::size_t s = 0; s < n_sig; ++s)
                cells[ev_.cells_[s]] += ev_.counts_[s] * last[s];
            return chsh_from_cells(cells);
        }

    private:
        const Evaluator& ev_;
        const Assignment& a_;
        std::vector<double> prefix_; // orbit level x signature, row-major
    };

private:
    static double chsh_from_cells(const double cells[16]) {
        // Row r = setting pair (a, b) with index 0 <-> +1; the quad is
        // (+1, -1, +1, -1), so X = M(r0) + M(r1) + M(r2) - M(r3).
        static const double sign[4] = {+1.0, -1.0, -1.0, +1.0};
        double m[4];
        for (std::size_t r = 0; r < 4; ++r) {
            double num = 0.0, den = 0.0;
            for (std::size_t c = 0; c < 4; ++c) {
                num += sign[c] * cells[r * 4 + c];
                den += cells[r * 4 + c];
            }
            m[r] = num / den;
        }
        return m[0] + m[1] + m[2] - m[3];
    }

    const SearchSpace& space_;
    std::size_t n_field_ = 0;
    std::vector<std::size_t> sizes_;
    std::vector<std::uint8_t> cells_;
    std::vector<double> counts_;
    std::vector<std::uint8_t> sig_; // n_sig x orbit_count, row-major
    std::vector<std::vector<std::vector<std::vector<double>>>> tables_;
};

void check_assignment(const SearchSpace& space, const Orbits& orbits, const Assignment& a) {
    if (a.beta_index >= space.betas.size() ||
        a.field_choice.size() != orbits.field_orbits.size() ||
        a.coupling_choice.size() != orbits.edge_orbits.size())
        throw BadStart("assignment shape does not match the search space");
    for (std::size_t v : a.field_choice)
        if (v >= space.field_values.size()) throw BadStart("field choice out of range");
    for (std::size_t v : a.coupling_choice)
        if (v >= space.coupling_values.size()) throw BadStart("coupling choice out of range");
}

Assignment decode(const SearchSpace& space, const Orbits& orbits, std::size_t index) {
    Assignment a;
    a.field_choice.resize(orbits.field_orbits.size());
    a.coupling_choice.resize(orbits.edge_orbits.size());
    for (std::size_t k = orbits.edge_orbits.size(); k-- > 0;) {
        a.coupling_choice[k] = index % space.coupling_values.size();
        index /= space.coupling_values.size();
    }
    for (std::size_t k = orbits.field_orbits.size(); k-- > 0;) {
        a.field_choice[k] = index % space.field_values.size();
        index /= space.field_values.size();
    }
    a.beta_index = index;
    return a;
}

// Odometer step in enumeration order (last coordinate fastest). Returns
// the lowest orbit level whose choice changed (0 on a beta rollover),
// i.e. the level a Scan must rebuild from.
std::size_t advance(const SearchSpace& space, Assignment& a) {
    for (std::size_t k = a.coupling_choice.size(); k-- > 0;) {
        if (++a.coupling_choice[k] < space.coupling_values.size())
            return a.field_choice.size() + k;
        a.coupling_choice[k] = 0;
    }
    for (std::size_t k = a.field_choice.size(); k-- > 0;) {
        if (++a.field_choice[k] < space.field_values.size()) return k;
        a.field_choice[k] = 0;
    }
    ++a.beta_index;
    return 0;
}

} // namespace

Orbits enumerate_orbits(const SearchSpace& space) {
    const auto& lat = space.lattice;
    lat.validate();
    const std::size_t n = lat.nodes.size();
    require_symmetry(space.mirror.size() == n, "mirror map must cover every node");
    std::vector<bool> hit(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        require_symmetry(space.mirror[i] < n, "mirror map leaves the node set");
        require_symmetry(space.mirror[space.mirror[i]] == i, "mirror map is not an involution");
        hit[space.mirror[i]] = true;
    }
    require_symmetry(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }),
                     "mirror map is not a permutation");
    require_symmetry(space.mirror[lat.roles.s1] == lat.roles.s2 &&
                         space.mirror[lat.roles.a] == lat.roles.b,
                     "mirror map must swap the two wings");

    auto edge_at = [&lat](std::size_t i, std::size_t j) {
        for (std::size_t e = 0; e < lat.edges.size(); ++e) {
            const auto& edge = lat.edges[e];
            if ((edge.i == i && edge.j == j) || (edge.i == j && edge.j == i)) return e;
        }
        return lat.edges.size();
    };

    if (space.betas.empty() || space.field_values.empty() || space.coupling_values.empty())
        throw EmptyGrid("search space needs non-empty beta, field and coupling lists");
    for (double beta : space.betas)
        if (!(beta > 0.0)) throw RangeError("beta values must be positive");

    Orbits orbits;
    std::vector<bool> node_seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (node_seen[i]) continue;
        std::vector<std::size_t> orbit = {i};
        node_seen[i] = true;
        if (space.mirror[i] != i) {
            orbit.push_back(space.mirror[i]);
            node_seen[space.mirror[i]] = true;
        }
        orbits.field_orbits.push_back(std::move(orbit));
    }
    std::vector<bool> edge_seen(lat.edges.size(), false);
    for (std::size_t e = 0; e < lat.edges.size(); ++e) {
        if (edge_seen[e]) continue;
        std::size_t image = edge_at(space.mirror[lat.edges[e].i], space.mirror[lat.edges[e].j]);
        require_symmetry(image < lat.edges.size(), "mirror map does not preserve the edge set");
        std::vector<std::size_t> orbit = {e};
        edge_seen[e] = true;
        if (image != e) {
            orbit.push_back(image);
            edge_seen[image] = true;
        }
        orbits.edge_orbits.push_back(std::move(orbit));
    }

    std::size_t total = space.betas.size();
    for (std::size_t k = 0; k < orbits.field_orbits.size(); ++k)
        total = saturating_mul(total, space.field_values.size());
    for (std::size_t k = 0; k < orbits.edge_orbits.size(); ++k)
        total = saturating_mul(total, space.coupling_values.size());
    orbits.total_count = total;
    return orbits;
}

SpinLattice apply_assignment(const SearchSpace& space, const Assignment& assignment) {
    Orbits orbits = enumerate_orbits(space);
    check_assignment(space, orbits, assignment);
    SpinLattice lat = space.lattice;
    lat.beta = space.betas[assignment.beta_index];
    for (std::size_t k = 0; k < orbits.field_orbits.size(); ++k)
        for (std::size_t node : orbits.field_orbits[k])
            lat.fields[node] = space.field_values[assignment.field_choice[k]];
    for (std::size_t k = 0; k < orbits.edge_orbits.size(); ++k)
        for (std::size_t e : orbits.edge_orbits[k])
            lat.edges[e].coupling = space.coupling_values[assignment.coupling_choice[k]];
    return lat;
}

double evaluate(const SearchSpace& space, const Assignment& assignment) {
    // Independent of the table-driven scorer on purpose: full enumeration
    // through the Hamiltonian, so tests can cross-check the fast path.
    return lattice_chsh(apply_assignment(space, assignment)).x_bi;
}

SearchResult exhaustive_max(const SearchSpace& space) {
    Orbits orbits = enumerate_orbits(space);
    if (orbits.total_count > kMaxGridPoints)
        throw SpaceTooLarge("grid has " + std::to_string(orbits.total_count) +
                            " points, limit is " + std::to_string(kMaxGridPoints));
    Evaluator evaluator(space, orbits);

    const std::size_t total = orbits.total_count;
    const std::size_t workers = std::min(worker_count(), total);
    struct Local {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t index = 0;
    };
    std::vector<Local> locals(workers);
    const std::size_t chunk = (total + workers - 1) / workers;

    auto run = [&](std::size_t w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(total, lo + chunk);
        if (lo >= hi) return;
        Assignment a = decode(space, orbits, lo);
        Evaluator::Scan scan(evaluator, a);
        Local local;
        for (std::size_t i = lo; i < hi; ++i) {
            double x = scan.score();
            if (x > local.best) {
                local.best = x;
                local.index = i;
            }
            if (i + 1 < hi) scan.rebuild(advance(space, a));
        }
        locals[w] = local;
    };
    if (workers <= 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    // Strictly-greater merge in range order keeps the earliest argmax, so
    // the result does not depend on the worker count.
    Local best = locals[0];
    for (std::size_t w = 1; w < workers; ++w)
        if (locals[w].best > best.best) best = locals[w];

    SearchResult result;
    result.best_x = best.best;
    result.best = decode(space, orbits, best.index);
    result.evaluations = total;
    return result;
}

SearchResult hill_climb(const SearchSpace& space, const Assignment& start) {
    Orbits orbits = enumerate_orbits(space);
    check_assignment(space, orbits, start);
    Evaluator evaluator(space, orbits);

    SearchResult result;
    Assignment current = start;
    double current_x = evaluator.score(current);
    result.evaluations = 1;
    result.trajectory.emplace_back(current, current_x);

    auto coordinate = [&](Assignment& a, std::size_t c) -> std::size_t& {
        if (c == 0) return a.beta_index;
        c -= 1;
        if (c < a.field_choice.size()) return a.field_choice[c];
        return a.coupling_choice[c - a.field_choice.size()];
    };
    auto limit = [&](std::size_t c) {
        if (c == 0) return space.betas.size();
        c -= 1;
        if (c < orbits.field_orbits.size()) return space.field_values.size();
        return space.coupling_values.size();
    };
    const std::size_t coords = 1 + orbits.field_orbits.size() + orbits.edge_orbits.size();

    for (;;) {
        double best_x = current_x;
        Assignment best = current;
        for (std::size_t c = 0; c < coords; ++c) {
            for (int step : {-1, +1}) {
                std::size_t value = coordinate(current, c);
                if (step < 0 && value == 0) continue;
                if (step > 0 && value + 1 >= limit(c)) continue;
                Assignment neighbor = current;
                coordinate(neighbor, c) = value + step;
                double x = evaluator.score(neighbor);
                ++result.evaluations;
                if (x > best_x) {
                    best_x = x;
                    best = neighbor;
                }
            }
        }
        if (best == current) break;
        current = std::move(best);
        current_x = best_x;
        result.trajectory.emplace_back(current, current_x);
    }
    result.best = current;
    result.best_x = current_x;
    return result;
}

Assignment random_assignment(const SearchSpace& space, std::mt19937_64& rng) {
    Orbits orbits = enumerate_orbits(space);
    auto pick = [&rng](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };
    Assignment a;
    a.beta_index = pick(space.betas.size());
    for (std::size_t k = 0; k < orbits.field_orbits.size(); ++k)
        a.field_choice.push_back(pick(space.field_values.size()));
    for (std::size_t k = 0; k < orbits.edge_orbits.size(); ++k)
        a.coupling_choice.push_back(pick(space.coupling_values.size()));
    return a;
}

std::vector<SlicePoint> landscape_slice(const SearchSpace& space, const Assignment& assignment,
                                        OrbitKind kind, std::size_t orbit_index) {
    Orbits orbits = enumerate_orbits(space);
    check_assignment(space, orbits, assignment);
    const std::vector<double>* values = nullptr;
    switch (kind) {
        case OrbitKind::beta:
            if (orbit_index != 0) throw BadSlice("beta has a single coordinate");
            values = &space.betas;
            break;
        case OrbitKind::field:
            if (orbit_index >= orbits.field_orbits.size())
                throw BadSlice("field orbit index out of range");
            values = &space.field_values;
            break;
        case OrbitKind::coupling:
            if (orbit_index >= orbits.edge_orbits.size())
                throw BadSlice("edge orbit index out of range");
            values = &space.coupling_values;
            break;
    }
    Evaluator evaluator(space, orbits);
    std::vector<SlicePoint> curve;
    for (std::size_t v = 0; v < values->size(); ++v) {
        Assignment point = assignment;
        switch (kind) {
            case OrbitKind::beta: point.beta_index = v; break;
            case OrbitKind::field: point.field_choice[orbit_index] = v; break;
            case OrbitKind::coupling: point.coupling_choice[orbit_index] = v; break;
        }
        curve.push_back({(*values)[v], evaluator.score(point)});
    }
    return curve;
}

SearchSpace paper_grid_space() {
    SearchSpace space;
    space.lattice = ladder10();
    const auto& lat = space.lattice;
    space.mirror.resize(lat.nodes.size());
    auto pair = [&](const char* u, const char* v) {
        std::size_t i = lat.node_index(u), j = lat.node_index(v);
        space.mirror[i] = j;
        space.mirror[j] = i;
    };
    pair("a", "b");
    pair("1", "2");
    pair("3", "5");
    pair("6", "8");
    pair("4", "4");
    pair("7", "7");
    space.betas = {1.0};
    space.field_values = {-1.0, 1.0, 3.0};
    space.coupling_values = {1.0, 2.0, 3.0, 4.0};
    return space;
}

SearchSpace hexagon_space() {
    SearchSpace space;
    space.lattice = hexagon6();
    const auto& lat = space.lattice;
    space.mirror.resize(lat.nodes.size());
    auto pair = [&](const char* u, const char* v) {
        std::size_t i = lat.node_index(u), j = lat.node_index(v);
        space.mirror[i] = j;
        space.mirror[j] = i;
    };
    pair("a", "b");
    pair("1", "2");
    pair("u", "u");
    pair("v", "v");
    space.betas = {1.0};
    space.field_values = {-1.0, 1.0, 3.0};
    space.coupling_values = {1.0, 2.0, 3.0, 4.0};
    return space;
}

} // namespace bellforge
