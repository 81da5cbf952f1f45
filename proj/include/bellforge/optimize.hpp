#pragma once

#include <random>

#include "bellforge/lattice.hpp"

namespace bellforge {

// Grid search domain: a template lattice whose couplings and fields are
// assigned per mirror-symmetry orbit. The mirror map is a node involution
// under which the edge set is closed and which swaps the two wings
// (s1 <-> s2, a <-> b).
struct SearchSpace {
    SpinLattice lattice;
    std::vector<std::size_t> mirror;     // node index -> mirrored node index
    std::vector<double> betas;           // outer sweep
    std::vector<double> field_values;    // choices per field orbit
    std::vector<double> coupling_values; // choices per edge orbit
};

struct Orbits {
    std::vector<std::vector<std::size_t>> field_orbits; // node indices
    std::vector<std::vector<std::size_t>> edge_orbits;  // edge indices
    std::size_t total_count = 0;                        // grid points incl. betas
};

// One grid point: indices into betas / field_values / coupling_values,
// per orbit in the order produced by enumerate_orbits.
struct Assignment {
    std::size_t beta_index = 0;
    std::vector<std::size_t> field_choice;
    std::vector<std::size_t> coupling_choice;

    bool operator==(const Assignment&) const = default;
};

struct SearchResult {
    double best_x = 0.0;
    Assignment best;
    std::size_t evaluations = 0;
    std::vector<std::pair<Assignment, double>> trajectory; // hill climbing only
};

// Validates the mirror map and groups nodes/edges into its orbits.
// Throws BadSymmetry.
Orbits enumerate_orbits(const SearchSpace& space);

// Materializes a grid point as a concrete lattice.
SpinLattice apply_assignment(const SearchSpace& space, const Assignment& assignment);

// CHSH score of one grid point (settings quad +1, -1, +1, -1).
double evaluate(const SearchSpace& space, const Assignment& assignment);

// Full deterministic grid sweep; ties broken by enumeration order (beta
// outermost, then field orbits, then edge orbits; earlier wins). Parallel
// across BELLFORGE_WORKERS with a worker-count-independent result.
// Throws SpaceTooLarge beyond 1e8 grid points.
SearchResult exhaustive_max(const SearchSpace& space);

// Steepest ascent over single-coordinate moves to adjacent value-list
// entries (beta included) until no neighbor improves. Deterministic given
// the start; the trajectory records every accepted step. Throws BadStart.
SearchResult hill_climb(const SearchSpace& space, const Assignment& start);

// Uniform random grid point, for seeded restart drivers.
Assignment random_assignment(const SearchSpace& space, std::mt19937_64& rng);

enum class OrbitKind { beta, field, coupling };

struct SlicePoint {
    double value = 0.0;
    double x_bi = 0.0;
};

// X_BI along one free coordinate, everything else frozen at `assignment`.
// Throws BadSlice for an unknown coordinate.
std::vector<SlicePoint> landscape_slice(const SearchSpace& space,
                                        const Assignment& assignment, OrbitKind kind,
                                        std::size_t orbit_index = 0);

// The inhomogeneous-ladder sweep: beta = 1, h in {-1, 1, 3} per node orbit,
// J in {1, 2, 3, 4} per edge orbit, mirror 1<->2, 3<->5, 6<->8, a<->b.
SearchSpace paper_grid_space();

// The same value grid on the six-spin ring with the default arrangement.
SearchSpace hexagon_space();

} // namespace bellforge
