#pragma once

#include <json.hpp>

#include "bellforge/lattice.hpp"
#include "bellforge/model.hpp"
#include "bellforge/optimize.hpp"

namespace bellforge {

// Probabilities travel as decimal strings with 17 significant digits, which
// round-trips every double bit-exactly.
std::string decimal(double p);
double parse_decimal(const std::string& text);

nlohmann::json table_to_json(const ConditionalTable& table);
ConditionalTable table_from_json(const nlohmann::json& doc);

nlohmann::json model_to_json(const HiddenVariableModel& model);
HiddenVariableModel model_from_json(const nlohmann::json& doc);

nlohmann::json lattice_to_json(const SpinLattice& lattice);
SpinLattice lattice_from_json(const nlohmann::json& doc);

nlohmann::json search_space_to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const nlohmann::json& doc);

// File helpers; throw IoError on unreadable paths or unparsable documents.
nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& doc);

} // namespace bellforge
