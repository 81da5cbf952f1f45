#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "bellforge/checks.hpp"
#include "bellforge/io.hpp"
#include "bellforge/optimize.hpp"
#include "bellforge/reproduce.hpp"

namespace py = pybind11;
using namespace bellforge;

namespace {

std::vector<Value> to_values(const py::sequence& seq) {
    std::vector<Value> out;
    for (const auto& item : seq) out.push_back(item.cast<Value>());
    return out;
}

} // namespace

PYBIND11_MODULE(_bellforge, m) {
    m.doc() = "exact laboratory for Bell-type experiments on finite models";
    m.attr("__version__") = "1.0.0";

    py::register_exception<Error>(m, "BellforgeError");

    py::class_<VariableSpec>(m, "VariableSpec")
        .def_readonly("name", &VariableSpec::name)
        .def_readonly("support", &VariableSpec::support);

    py::class_<ConditionalTable>(m, "ConditionalTable")
        .def_property_readonly("given_vars", &ConditionalTable::given_vars)
        .def_property_readonly("target_vars", &ConditionalTable::target_vars)
        .def_property_readonly("given_count", &ConditionalTable::given_count)
        .def_property_readonly("target_count", &ConditionalTable::target_count)
        .def_property_readonly("entries", &ConditionalTable::entries)
        .def("at", &ConditionalTable::at, py::arg("given_index"), py::arg("target_index"))
        .def(
            "prob",
            [](const ConditionalTable& t, const py::sequence& given,
               const py::sequence& target) {
                return t.prob(to_values(given), to_values(target));
            },
            py::arg("given"), py::arg("target"))
        .def("given_values", &ConditionalTable::given_values)
        .def("target_values", &ConditionalTable::target_values)
        .def("marginalize", &ConditionalTable::marginalize, py::arg("drop"));

    py::class_<SettingsQuad>(m, "SettingsQuad")
        .def(py::init([](Value a, Value ap, Value b, Value bp) {
                 return SettingsQuad{std::move(a), std::move(ap), std::move(b),
                                     std::move(bp)};
             }),
             py::arg("a"), py::arg("a_prime"), py::arg("b"), py::arg("b_prime"))
        .def_readonly("a", &SettingsQuad::a)
        .def_readonly("a_prime", &SettingsQuad::a_prime)
        .def_readonly("b", &SettingsQuad::b)
        .def_readonly("b_prime", &SettingsQuad::b_prime);

    py::class_<ChshReport>(m, "ChshReport")
        .def_readonly("m_ab", &ChshReport::m_ab)
        .def_readonly("m_apb", &ChshReport::m_apb)
        .def_readonly("m_abp", &ChshReport::m_abp)
        .def_readonly("m_apbp", &ChshReport::m_apbp)
        .def_readonly("x_bi", &ChshReport::x_bi);

    py::class_<HiddenVariableModel>(m, "HiddenVariableModel")
        .def_readonly("setting_dist", &HiddenVariableModel::setting_dist)
        .def_readonly("rho0", &HiddenVariableModel::rho0)
        .def_readonly("lambda1", &HiddenVariableModel::lambda1)
        .def_readonly("lambda2", &HiddenVariableModel::lambda2)
        .def_readonly("sigma1", &HiddenVariableModel::sigma1)
        .def_readonly("sigma2", &HiddenVariableModel::sigma2)
        .def("strict_background_shape", &HiddenVariableModel::strict_background_shape);

    py::class_<CheckVerdict>(m, "CheckVerdict")
        .def_readonly("condition_id", &CheckVerdict::condition_id)
        .def_readonly("max_deviation", &CheckVerdict::max_deviation)
        .def_readonly("satisfied", &CheckVerdict::satisfied)
        .def_readonly("tolerance", &CheckVerdict::tolerance)
        .def_readonly("skipped", &CheckVerdict::skipped)
        .def_property_readonly(
            "witness", [](const CheckVerdict& v) { return to_string(v.witness); });

    py::class_<LatticeEdge>(m, "LatticeEdge")
        .def_readonly("i", &LatticeEdge::i)
        .def_readonly("j", &LatticeEdge::j)
        .def_readwrite("coupling", &LatticeEdge::coupling);

    py::class_<SpinLattice>(m, "SpinLattice")
        .def_readonly("nodes", &SpinLattice::nodes)
        .def_readonly("edges", &SpinLattice::edges)
        .def_readwrite("fields", &SpinLattice::fields)
        .def_readwrite("beta", &SpinLattice::beta)
        .def("node_index", &SpinLattice::node_index)
        .def("validate", &SpinLattice::validate);

    py::class_<Assignment>(m, "Assignment")
        .def_readonly("beta_index", &Assignment::beta_index)
        .def_readonly("field_choice", &Assignment::field_choice)
        .def_readonly("coupling_choice", &Assignment::coupling_choice);

    py::class_<SearchResult>(m, "SearchResult")
        .def_readonly("best_x", &SearchResult::best_x)
        .def_readonly("best", &SearchResult::best)
        .def_readonly("evaluations", &SearchResult::evaluations);

    py::class_<SearchSpace>(m, "SearchSpace")
        .def_readonly("betas", &SearchSpace::betas)
        .def_readonly("field_values", &SearchSpace::field_values)
        .def_readonly("coupling_values", &SearchSpace::coupling_values);

    // Models and composition.
    m.def("bb1", &bb1);
    m.def("dilorenzo", &dilorenzo, py::arg("settings"));
    m.def(
        "random_local_model",
        [](std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return random_local_model(rng);
        },
        py::arg("seed"));
    m.def("compose_bb", &compose_bb);
    m.def("compose_full", &compose_full);
    m.def("canonical_angle", &canonical_angle);
    m.def("chsh", &chsh, py::arg("joint"), py::arg("settings"));
    m.def("quantum_correlation", &quantum_correlation);

    // Premise checks.
    m.def("check_oi", &check_oi, py::arg("model"), py::arg("tolerance") = kCheckTolerance);
    m.def("check_pi", &check_pi, py::arg("model"), py::arg("tolerance") = kCheckTolerance);
    m.def("check_mi", &check_mi, py::arg("model"), py::arg("tolerance") = kCheckTolerance);
    m.def("check_factorability", &check_factorability, py::arg("model"),
          py::arg("tolerance") = kCheckTolerance);
    m.def("check_no_signaling", &check_no_signaling, py::arg("model"),
          py::arg("tolerance") = kCheckTolerance);
    m.def("check_screening_off", &check_screening_off, py::arg("model"),
          py::arg("tolerance") = kCheckTolerance);

    // Lattices.
    m.def("ladder10", &ladder10, py::arg("coupling") = 1.0, py::arg("beta") = 1.0);
    m.def("hexagon6", &hexagon6,
          py::arg("arrangement") =
              std::vector<std::string>{"a", "1", "u", "2", "b", "v"},
          py::arg("coupling") = 1.0, py::arg("beta") = 1.0);
    m.def("hamiltonian", &hamiltonian);
    m.def("boltzmann_joint", &boltzmann_joint);
    m.def("bell_conditional", &bell_conditional);
    m.def("lattice_chsh", &lattice_chsh);
    m.def("closed_form_ladder", &closed_form_ladder, py::arg("K"));
    m.def("lattice_as_hv_model", &lattice_as_hv_model, py::arg("lattice"),
          py::arg("l0_nodes"), py::arg("l1_nodes"), py::arg("l2_nodes"));

    // Coupling search.
    m.def("paper_grid_space", &paper_grid_space);
    m.def("hexagon_space", &hexagon_space);
    m.def("exhaustive_max", &exhaustive_max);
    m.def("hill_climb", &hill_climb, py::arg("space"), py::arg("start"));
    m.def(
        "random_assignment",
        [](const SearchSpace& space, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return random_assignment(space, rng);
        },
        py::arg("space"), py::arg("seed"));
    m.def("evaluate", &evaluate, py::arg("space"), py::arg("assignment"));
    m.def("apply_assignment", &apply_assignment, py::arg("space"), py::arg("assignment"));

    // Serialization, via document strings.
    m.def("model_to_json", [](const HiddenVariableModel& model) {
        return model_to_json(model).dump(2);
    });
    m.def("model_from_json", [](const std::string& text) {
        return model_from_json(nlohmann::json::parse(text));
    });
    m.def("lattice_to_json",
          [](const SpinLattice& lat) { return lattice_to_json(lat).dump(2); });
    m.def("lattice_from_json", [](const std::string& text) {
        return lattice_from_json(nlohmann::json::parse(text));
    });
}
