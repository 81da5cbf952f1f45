#include "bellforge/io.hpp"

#include <cstdio>
#include <fstream>

namespace bellforge {

namespace {

using nlohmann::json;

json value_to_json(const Value& v) {
    if (std::holds_alternative<int>(v)) return std::get<int>(v);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

Value value_from_json(const json& j) {
    if (j.is_number_integer()) return Value{int(j.get<std::int64_t>())};
    if (j.is_number_float()) return Value{j.get<double>()};
    if (j.is_string()) return Value{j.get<std::string>()};
    throw IoError("support value must be an integer, a real or a string");
}

json vars_to_json(const std::vector<VariableSpec>& vars) {
    json out = json::array();
    for (const auto& var : vars) {
        json support = json::array();
        for (const auto& v : var.support) support.push_back(value_to_json(v));
        out.push_back({{"name", var.name}, {"support", support}});
    }
    return out;
}

std::vector<VariableSpec> vars_from_json(const json& doc) {
    if (!doc.is_array()) throw IoError("variable list must be an array");
    std::vector<VariableSpec> vars;
    for (const auto& entry : doc) {
        VariableSpec var;
        var.name = entry.at("name").get<std::string>();
        for (const auto& v : entry.at("support")) var.support.push_back(value_from_json(v));
        vars.push_back(std::move(var));
    }
    return vars;
}

} // namespace

json table_to_json(const ConditionalTable& table) {
    json entries = json::array();
    for (double p : table.entries()) entries.push_back(decimal(p));
    return {{"given", vars_to_json(table.given_vars())},
            {"target", vars_to_json(table.target_vars())},
            {"entries", entries}};
}

ConditionalTable table_from_json(const json& doc) {
    std::vector<double> entries;
    for (const auto& e : doc.at("entries")) {
        if (!e.is_string()) throw IoError("probabilities must be decimal strings");
        entries.push_back(parse_decimal(e.get<std::string>()));
    }
    try {
        // make() would renormalize rows and perturb the trailing bits; range
        // checks plus an explicit residual gate keep round-trips bit-exact.
        auto table = ConditionalTable::make_unnormalized(
            vars_from_json(doc.at("given")), vars_from_json(doc.at("target")),
            std::move(entries));
        for (double r : table.row_residuals())
            if (r > kNormTolerance)
                throw NormalizationError("table row is not normalized (residual " +
                                         decimal(r) + ")");
        return table;
    } catch (const IoError&) {
        throw;
    } catch (const NormalizationError&) {
        throw;
    } catch (const Error& e) {
        throw IoError(std::string("invalid table: ") + e.what());
    }
}

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string decimal(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    return buf;
}

double parse_decimal(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw IoError("not a decimal number: " + text);
    }
    if (used != text.size()) throw IoError("not a decimal number: " + text);
    return v;
}

json model_to_json(const HiddenVariableModel& model) {
    json settings = json::array();
    for (const auto& v : model.setting_var_x().support) settings.push_back(value_to_json(v));
    json settings_y = json::array();
    for (const auto& v : model.setting_var_y().support) settings_y.push_back(value_to_json(v));
    json lambda0 = json::array();
    for (const auto& v : model.rho0.target_vars()[0].support)
        lambda0.push_back(value_to_json(v));
    return {{"setting_supports", {{"x", settings}, {"y", settings_y}}},
            {"lambda0", lambda0},
            {"tables",
             {{"setting_dist", table_to_json(model.setting_dist)},
              {"rho0", table_to_json(model.rho0)},
              {"lambda1", table_to_json(model.lambda1)},
              {"lambda2", table_to_json(model.lambda2)},
              {"sigma1", table_to_json(model.sigma1)},
              {"sigma2", table_to_json(model.sigma2)}}}};
}

HiddenVariableModel model_from_json(const json& doc) {
    return guarded("invalid model document", [&] {
        const json& tables = doc.at("tables");
        HiddenVariableModel model{table_from_json(tables.at("setting_dist")),
                                  table_from_json(tables.at("rho0")),
                                  table_from_json(tables.at("lambda1")),
                                  table_from_json(tables.at("lambda2")),
                                  table_from_json(tables.at("sigma1")),
                                  table_from_json(tables.at("sigma2"))};
        try {
            model.validate_shape();
        } catch (const Error& e) {
            throw IoError(std::string("invalid model document: ") + e.what());
        }
        return model;
    });
}

json lattice_to_json(const SpinLattice& lattice) {
    json edges = json::array();
    for (const auto& e : lattice.edges)
        edges.push_back({lattice.nodes[e.i], lattice.nodes[e.j], e.coupling});
    json fields = json::object();
    for (std::size_t i = 0; i < lattice.nodes.size(); ++i)
        fields[lattice.nodes[i]] = lattice.fields[i];
    return {{"nodes", lattice.nodes},
            {"edges", edges},
            {"fields", fields},
            {"beta", lattice.beta},
            {"roles",
             {{"s1", lattice.nodes[lattice.roles.s1]},
              {"s2", lattice.nodes[lattice.roles.s2]},
              {"a", lattice.nodes[lattice.roles.a]},
              {"b", lattice.nodes[lattice.roles.b]}}}};
}

SpinLattice lattice_from_json(const json& doc) {
    return guarded("invalid lattice document", [&] {
        SpinLattice lat;
        lat.nodes = doc.at("nodes").get<std::vector<std::string>>();
        auto index = [&lat](const std::string& id) {
            try {
                return lat.node_index(id);
            } catch (const Error& e) {
                throw IoError(std::string("invalid lattice document: ") + e.what());
            }
        };
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 3)
                throw IoError("each edge must be a [node, node, coupling] triple");
            lat.edges.push_back({index(e[0].get<std::string>()),
                                 index(e[1].get<std::string>()), e[2].get<double>()});
        }
        lat.fields.assign(lat.nodes.size(), 0.0);
        for (const auto& [node, h] : doc.at("fields").items())
            lat.fields[index(node)] = h.get<double>();
        lat.beta = doc.at("beta").get<double>();
        const json& roles = doc.at("roles");
        lat.roles.s1 = index(roles.at("s1").get<std::string>());
        lat.roles.s2 = index(roles.at("s2").get<std::string>());
        lat.roles.a = index(roles.at("a").get<std::string>());
        lat.roles.b = index(roles.at("b").get<std::string>());
        // Topology validation errors propagate as-is; callers treat them as
        // failed validation rather than an unreadable document.
        lat.validate();
        return lat;
    });
}

json search_space_to_json(const SearchSpace& space) {
    json mirror = json::object();
    for (std::size_t i = 0; i < space.mirror.size(); ++i)
        mirror[space.lattice.nodes[i]] = space.lattice.nodes[space.mirror[i]];
    return {{"lattice", lattice_to_json(space.lattice)},
            {"mirror", mirror},
            {"betas", space.betas},
            {"field_values", space.field_values},
            {"coupling_values", space.coupling_values}};
}

SearchSpace search_space_from_json(const json& doc) {
    return guarded("invalid search-space document", [&] {
        SearchSpace space;
        space.lattice = lattice_from_json(doc.at("lattice"));
        space.mirror.assign(space.lattice.nodes.size(), 0);
        const json& mirror = doc.at("mirror");
        for (std::size_t i = 0; i < space.lattice.nodes.size(); ++i) {
            const std::string& node = space.lattice.nodes[i];
            if (!mirror.contains(node))
                throw IoError("mirror map is missing node " + node);
            try {
                space.mirror[i] = space.lattice.node_index(mirror.at(node).get<std::string>());
            } catch (const Error& e) {
                throw IoError(std::string("invalid search-space document: ") + e.what());
            }
        }
        space.betas = doc.at("betas").get<std::vector<double>>();
        space.field_values = doc.at("field_values").get<std::vector<double>>();
        space.coupling_values = doc.at("coupling_values").get<std::vector<double>>();
        return space;
    });
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw IoError("cannot parse " + path);
    return doc;
}

void save_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("cannot write " + path);
}

} // namespace bellforge
