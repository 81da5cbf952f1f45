#pragma once

#include <json.hpp>

#include "bellforge/model.hpp"

namespace bellforge {

// One reproduction experiment: a headline number checked against its
// reference value. Soft criteria (hard == false) report discrepancies
// without failing the run.
struct CriterionResult {
    std::string id;
    std::string summary;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool hard = true;
    bool passed = true;
    double seconds = 0.0;
    nlohmann::json details;
};

// The experiment ids accepted by `only`, in execution order.
std::vector<std::string> reproduction_ids();

// Runs every reproduction experiment (or the listed subset) and returns
// one result per experiment. Throws ConfigError for an unknown id.
std::vector<CriterionResult> reproduce_all(const std::vector<std::string>& only = {});

} // namespace bellforge
