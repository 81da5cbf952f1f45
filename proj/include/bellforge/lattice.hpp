#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellforge/model.hpp"

namespace bellforge {

// Exhaustive 2^N enumeration bound.
inline constexpr std::size_t kMaxSpins = 24;

struct LatticeEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    double coupling = 0.0;
};

// Node indices of the four special spins: the outcomes s1, s2 and the
// setting spins a, b whose values act as the analyzer settings.
struct LatticeRoles {
    std::size_t s1 = 0;
    std::size_t s2 = 0;
    std::size_t a = 0;
    std::size_t b = 0;
};

// Finite Ising system H = -sum J_ij s_i s_j - sum h_i s_i at inverse
// temperature beta. Spin configurations are packed bitmasks in node order:
// bit k set means node k has spin +1.
struct SpinLattice {
    std::vector<std::string> nodes;
    std::vector<LatticeEdge> edges;
    std::vector<double> fields; // one per node
    double beta = 1.0;
    LatticeRoles roles;

    std::size_t node_index(const std::string& id) const;
    std::vector<std::size_t> hidden_nodes() const; // nodes minus roles, in node order
    void validate() const;
};

// The 2x5 ladder: top rail 1-3-4-5-2, bottom rail a-6-7-8-b, five rungs
// (1,a), (3,6), (4,7), (5,8), (2,b); 13 edges, homogeneous coupling, no
// fields. Node order a, b, 1, 2, 3, ..., 8.
SpinLattice ladder10(double coupling = 1.0, double beta = 1.0);

// Six-spin ring. The arrangement lists the nodes around the cycle and must
// contain "1", "2", "a", "b" exactly once each plus two hidden nodes; the
// default a-1-u-2-b-v has its mirror axis through u and v.
SpinLattice hexagon6(const std::vector<std::string>& arrangement =
                         {"a", "1", "u", "2", "b", "v"},
                     double coupling = 1.0, double beta = 1.0);

double hamiltonian(const SpinLattice& lattice, std::uint32_t config);

// Exact Boltzmann distribution over all 2^N configurations, indexed by the
// packed bitmask. Energies are shifted by the minimum before exponentiation
// so large beta*|H| cannot overflow.
std::vector<double> boltzmann_joint(const SpinLattice& lattice);

// P(s1, s2 | a, b): hidden spins marginalized, setting-spin cells divided
// out. Givens (x, y) and targets (s1, s2), all with support {+1, -1}.
ConditionalTable bell_conditional(const SpinLattice& lattice);

// CHSH over bell_conditional with the settings quad (+1, -1, +1, -1).
ChshReport lattice_chsh(const SpinLattice& lattice);

// Path-expansion closed form of the homogeneous zero-field ladder
// conditional, K = tanh(beta J). Throws RangeError for |K| >= 1.
ConditionalTable closed_form_ladder(double K);

// Reads the lattice as a hidden-variable model. The three groups must be
// disjoint sets of hidden nodes; hidden nodes left out of every group are
// marginalized away (conditioning on a spin and summing it out are very
// different things — a separator spin placed in l0 makes the two halves
// conditionally independent, while leaving it unassigned keeps them
// coupled). Group values are packed bitmasks over the group's nodes in the
// order given. All component tables are exact conditionals of the Boltzmann
// joint, so compose_bb reproduces bell_conditional either way. The setting
// distribution is uniform.
HiddenVariableModel lattice_as_hv_model(const SpinLattice& lattice,
                                        const std::vector<std::string>& l0_nodes,
                                        const std::vector<std::string>& l1_nodes,
                                        const std::vector<std::string>& l2_nodes);

// Worker count for parallel enumeration: BELLFORGE_WORKERS when set and
// positive, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

} // namespace bellforge
