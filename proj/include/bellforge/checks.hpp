#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bellforge/model.hpp"

namespace bellforge {

inline constexpr double kCheckTolerance = 1e-10;

// Outcome of one premise check. max_deviation is a total-variation distance
// for distribution comparisons and a max-abs difference for pointwise
// equalities; both live on the same [0, 1] scale. Conditioning events with
// mass below kZeroMass are skipped and counted.
struct CheckVerdict {
    std::string condition_id;
    double max_deviation = 0.0;
    std::vector<Binding> witness;
    bool satisfied = true;
    double tolerance = kCheckTolerance;
    std::size_t skipped = 0;

    // Re-evaluates the witness assignment against the same joint; tests use
    // this to confirm the recorded deviation is reproducible.
    std::function<double()> recheck;
};

// Each wing's outcome is screened by the hidden variables it can see:
// (l0, l1) on the left, (l0, l2) on the right. The remote wing's background
// variable is marginalized out of the conditioning set, so a response that
// reads the other wing's outcome (rather than the shared hidden state) is
// detected as a dependence.

// Outcome independence on both wings, P(s1 | s2, x, y, l0, l1) =
// P(s1 | x, y, l0, l1) and mirrored; the worst wing is reported.
CheckVerdict check_oi(const HiddenVariableModel& model, double tolerance = kCheckTolerance);

// Parameter independence on both wings, P(s2 | x, y, l0, l2) =
// P(s2 | y, l0, l2) and mirrored; the worst wing is reported.
CheckVerdict check_pi(const HiddenVariableModel& model, double tolerance = kCheckTolerance);

// Measurement independence, rho(l | x, y) identical across setting pairs
// (checked pairwise and against the pooled marginal).
CheckVerdict check_mi(const HiddenVariableModel& model, double tolerance = kCheckTolerance);

// Clauser-Horne factorability, P(s1, s2 | x, y, l0, l1, l2) =
// P(s1 | x, l0, l1) P(s2 | y, l0, l2); the per-wing factors are pooled over
// the remote setting with the setting-distribution weights.
CheckVerdict check_factorability(const HiddenVariableModel& model,
                                 double tolerance = kCheckTolerance);

// The six non-signaling conditions, in order:
//   NS1  P(s1 | x, b)      = P(s1 | x, b')
//   NS2  P(l1 | x, b)      = P(l1 | x, b')
//   NS3  P(s1, l1 | x, b)  = P(s1, l1 | x, b')
//   NS4  P(s2 | a, y)      = P(s2 | a', y)
//   NS5  P(l2 | a, y)      = P(l2 | a', y)
//   NS6  P(s2, l2 | a, y)  = P(s2, l2 | a', y)
std::vector<CheckVerdict> check_no_signaling(const HiddenVariableModel& model,
                                             double tolerance = kCheckTolerance);

// Screening-off at the hidden-variable level: P(l1, l2 | l0, x, y) =
// P(l1 | l0, x) P(l2 | l0, y). Satisfied means the equality holds; the
// background models in scope are expected to violate it.
CheckVerdict check_screening_off(const HiddenVariableModel& model,
                                 double tolerance = kCheckTolerance);

} // namespace bellforge
