#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bellforge/bell.hpp"
#include "bellforge/prob.hpp"

namespace bellforge {

// Canonical variable names used by every model table.
//   x, y   - left / right analyzer settings
//   l0     - setting-independent hidden variables
//   l1, l2 - background hidden variables near the left / right analyzer
//   s1, s2 - outcomes, support {+1, -1}
//
// The five component tables follow the assembly
//   P(s1, s2 | x, y) = sum_{l0,l1,l2} rho0 * lambda1 * lambda2 * sigma1 * sigma2.
// Each table may condition on any subset of the variables listed for it;
// the strict background shape (rho0 unconditional, lambda1 on (l0, x),
// lambda2 on (l0, l1, y), sigma1 on (l0, l1, x), sigma2 on (s1, l0, l2, y))
// is what the hand-built models use, while lattice extraction and the
// direction-atom model need the wider conditioning sets to stay exact.
struct HiddenVariableModel {
    ConditionalTable setting_dist; // targets (x, y), unconditional
    ConditionalTable rho0;         // target l0,  givens within {x, y}
    ConditionalTable lambda1;      // target l1,  givens within {l0, x, y}
    ConditionalTable lambda2;      // target l2,  givens within {l0, l1, x, y}
    ConditionalTable sigma1;       // target s1,  givens within {l0, l1, l2, x, y}
    ConditionalTable sigma2;       // target s2,  givens within {s1, l0, l1, l2, x, y}

    const VariableSpec& setting_var_x() const { return setting_dist.target_vars()[0]; }
    const VariableSpec& setting_var_y() const { return setting_dist.target_vars()[1]; }

    // True when the model has the strict shape above, including a
    // setting-independent rho0.
    bool strict_background_shape() const;

    void validate_shape() const;
};

struct NormalizationResidual {
    std::string table;
    std::string given_assignment;
    double residual;
};

// Residuals above kNormTolerance, one per offending conditioning assignment.
std::vector<NormalizationResidual> validate(const HiddenVariableModel& model);

// Exact joint P(s1, s2, l0, l1, l2 | x, y): the five-factor product summed
// over nothing; the substrate for the independence checkers.
ConditionalTable compose_full(const HiddenVariableModel& model);

// Exact sum over (l0, l1, l2): P(s1, s2 | x, y).
ConditionalTable compose_bb(const HiddenVariableModel& model);

// Local composition: P(s1, s2 | x, y) = sum_l P(s1|x,l) P(s2|y,l) rho(l).
// rho targets "l" unconditionally; responses condition on ("l", setting).
ConditionalTable compose_local(const ConditionalTable& rho,
                               const ConditionalTable& response1,
                               const ConditionalTable& response2);

// Wraps local components as a background model (lambda goes into the l0
// slot, l1 and l2 are singletons), so the checkers can run on it.
HiddenVariableModel local_as_model(const ConditionalTable& rho,
                                   const ConditionalTable& response1,
                                   const ConditionalTable& response2);

// The semi-deterministic background model with settings {a, a'} x {b, b'},
// singleton l0 and binary l1, l2. Maximally violates the CHSH bound while
// remaining non-signaling.
HiddenVariableModel bb1();

// Direction-atom model over a settings quad given in radians. The hidden
// supports are the atoms {+x, -x, +y, -y} resolved as unit-vector angles;
// composition reproduces the singlet correlation exactly.
HiddenVariableModel dilorenzo(const SettingsQuad& settings);

// Wraps angles into [0, 2pi) and snaps near-coincident values, so atom
// supports stay finite and exact.
double canonical_angle(double radians);

// Seeded random local model for the theorem-guard property suite:
// Dirichlet-flat rows, hidden support size 2..8.
HiddenVariableModel random_local_model(std::mt19937_64& rng);

} // namespace bellforge
