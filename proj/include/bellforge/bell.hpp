#pragma once

#include <vector>

#include "bellforge/prob.hpp"

namespace bellforge {

// The four analyzer settings of a CHSH run. Settings are opaque values:
// labels for BB-1 and lattices, radians for the direction-valued models.
struct SettingsQuad {
    Value a;
    Value a_prime;
    Value b;
    Value b_prime;

    void validate() const;
};

struct ChshReport {
    double m_ab = 0.0;
    double m_apb = 0.0;
    double m_abp = 0.0;
    double m_apbp = 0.0;
    double x_bi = 0.0;
    SettingsQuad settings;
};

// <sigma1.sigma2> at settings (x, y) for a joint table P(s1, s2 | x, y)
// whose outcome supports are {+1, -1}.
double correlator(const ConditionalTable& joint, const Value& x, const Value& y);

// M(a,b) + M(a',b) + M(a,b') - M(a',b').
ChshReport chsh(const ConditionalTable& joint, const SettingsQuad& settings);

// Singlet-state reference: P(s1, s2 | a, b) = (1 - s1.s2.cos(a-b)) / 4.
double quantum_correlation(int sigma1, int sigma2, double a, double b);

// Joint table of the quantum correlation over explicit angle grids.
ConditionalTable quantum_table(const std::vector<double>& x_angles,
                               const std::vector<double>& y_angles);

// Report with the largest |X_BI| over the grid; ties keep the earliest
// grid entry.
std::pair<ChshReport, SettingsQuad> chsh_scan(const ConditionalTable& joint,
                                              const std::vector<SettingsQuad>& grid);

} // namespace bellforge
