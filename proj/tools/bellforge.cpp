#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>

#include "bellforge/checks.hpp"
#include "bellforge/io.hpp"
#include "bellforge/optimize.hpp"
#include "bellforge/reproduce.hpp"

using namespace bellforge;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string config_hash(const json& config) {
    // FNV-1a over the canonical dump; enough to tie a report to its config.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json provenance(const json& config, std::uint64_t seed) {
    return {{"tool", "bellforge"},
            {"version", kVersion},
            {"seed", seed},
            {"config_hash", config_hash(config)}};
}

void emit(const json& report, const std::string& out) {
    if (out.empty()) {
        std::printf("%s\n", report.dump(2).c_str());
    } else {
        save_json(out, report);
        std::printf("report written to %s\n", out.c_str());
    }
}

json chsh_to_json(const ChshReport& report) {
    return {{"m_ab", decimal(report.m_ab)},
            {"m_apb", decimal(report.m_apb)},
            {"m_abp", decimal(report.m_abp)},
            {"m_apbp", decimal(report.m_apbp)},
            {"x_bi", decimal(report.x_bi)}};
}

json verdict_to_json(const CheckVerdict& v) {
    json out = {{"condition", v.condition_id},
                {"satisfied", v.satisfied},
                {"max_deviation", decimal(v.max_deviation)},
                {"tolerance", decimal(v.tolerance)},
                {"skipped_zero_mass_events", v.skipped}};
    if (!v.witness.empty()) out["witness"] = to_string(v.witness);
    return out;
}

SettingsQuad quad_from_supports(const HiddenVariableModel& model) {
    const auto& xs = model.setting_var_x().support;
    const auto& ys = model.setting_var_y().support;
    return {xs[0], xs[1], ys[0], ys[1]};
}

HiddenVariableModel resolve_model(const std::string& name) {
    if (name == "bb1") return bb1();
    if (name == "dilorenzo")
        return dilorenzo({Value{0.0}, Value{M_PI / 2}, Value{5 * M_PI / 4},
                          Value{3 * M_PI / 4}});
    return model_from_json(load_json(name));
}

struct LatticeArgs {
    std::string preset;
    std::string file;
    double beta = 1.0;
    double coupling = 1.0;
    bool beta_set = false;
    bool coupling_set = false;
};

SpinLattice resolve_lattice(const LatticeArgs& args) {
    if (args.preset.empty() == args.file.empty())
        throw ConfigError("give exactly one of --preset and --lattice-file");
    if (!args.file.empty()) {
        auto lat = lattice_from_json(load_json(args.file));
        if (args.beta_set) lat.beta = args.beta;
        if (args.coupling_set)
            for (auto& e : lat.edges) e.coupling = args.coupling;
        lat.validate();
        return lat;
    }
    if (args.preset == "ladder10") return ladder10(args.coupling, args.beta);
    if (args.preset == "hexagon6")
        return hexagon6({"a", "1", "u", "2", "b", "v"}, args.coupling, args.beta);
    throw ConfigError("unknown preset: " + args.preset + " (ladder10, hexagon6)");
}

SearchSpace resolve_space(const std::string& name) {
    if (name == "paper-grid") return paper_grid_space();
    if (name == "hexagon") return hexagon_space();
    return search_space_from_json(load_json(name));
}

int run_model_check(const std::string& name, double tolerance, const std::string& out) {
    auto model = resolve_model(name);
    json config = {{"command", "model check"}, {"model", name}, {"tolerance", tolerance}};
    json report = {{"provenance", provenance(config, 0)}, {"model", name}};

    auto residuals = validate(model);
    json residual_doc = json::array();
    for (const auto& res : residuals)
        residual_doc.push_back({{"table", res.table},
                                {"given", res.given_assignment},
                                {"residual", decimal(res.residual)}});
    report["normalization_residuals"] = residual_doc;

    json verdicts = json::array();
    verdicts.push_back(verdict_to_json(check_oi(model, tolerance)));
    verdicts.push_back(verdict_to_json(check_pi(model, tolerance)));
    verdicts.push_back(verdict_to_json(check_mi(model, tolerance)));
    verdicts.push_back(verdict_to_json(check_factorability(model, tolerance)));
    for (const auto& ns : check_no_signaling(model, tolerance))
        verdicts.push_back(verdict_to_json(ns));
    verdicts.push_back(verdict_to_json(check_screening_off(model, tolerance)));
    report["verdicts"] = verdicts;
    report["chsh"] = chsh_to_json(chsh(compose_bb(model), quad_from_supports(model)));

    emit(report, out);
    return residuals.empty() ? 0 : 1;
}

int run_model_eval(const std::string& name, const std::string& out) {
    auto model = resolve_model(name);
    json config = {{"command", "model eval"}, {"model", name}};
    json report = {{"provenance", provenance(config, 0)},
                   {"model", name},
                   {"composed_table", table_to_json(compose_bb(model))},
                   {"chsh", chsh_to_json(chsh(compose_bb(model), quad_from_supports(model)))}};
    emit(report, out);
    return 0;
}

int run_lattice_eval(const LatticeArgs& args, const std::string& out) {
    auto lat = resolve_lattice(args);
    json config = {{"command", "lattice eval"}, {"lattice", lattice_to_json(lat)}};
    auto table = bell_conditional(lat);
    const Value plus[] = {Value{+1}, Value{+1}};
    json report = {{"provenance", provenance(config, 0)},
                   {"lattice", lattice_to_json(lat)},
                   {"conditional_table", table_to_json(table)},
                   {"p_plus_plus_given_plus_plus", decimal(table.prob(plus, plus))},
                   {"chsh", chsh_to_json(lattice_chsh(lat))}};
    emit(report, out);
    return 0;
}

int run_lattice_scan(const LatticeArgs& args, const std::string& out) {
    LatticeArgs base = args;
    base.beta_set = false; // beta is the scan variable
    bool ladder = args.preset == "ladder10";
    std::ofstream file;
    std::FILE* console = stdout;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw IoError("cannot write " + out);
    }
    auto line = [&](const std::string& text) {
        if (out.empty())
            std::fprintf(console, "%s\n", text.c_str());
        else
            file << text << "\n";
    };
    line(ladder ? "beta,K,x_bi,p_plus_plus,closed_form_deviation"
                : "beta,K,x_bi,p_plus_plus");
    for (int i = 1; i <= 50; ++i) {
        double beta = 0.05 * i;
        LatticeArgs point = base;
        point.beta = beta;
        point.beta_set = true;
        auto lat = resolve_lattice(point);
        auto table = bell_conditional(lat);
        const Value plus[] = {Value{+1}, Value{+1}};
        double K = std::tanh(beta * args.coupling);
        std::string row = decimal(beta) + "," + decimal(K) + "," +
                          decimal(lattice_chsh(lat).x_bi) + "," +
                          decimal(table.prob(plus, plus));
        if (ladder) {
            auto closed = closed_form_ladder(K);
            double worst = 0.0;
            for (std::size_t g = 0; g < 4; ++g)
                for (std::size_t k = 0; k < 4; ++k)
                    worst = std::max(worst, std::abs(table.at(g, k) - closed.at(g, k)));
            row += "," + decimal(worst);
        }
        line(row);
    }
    if (!out.empty()) std::printf("curve written to %s\n", out.c_str());
    return 0;
}

int run_optimize(const std::string& space_name, const std::string& strategy,
                 std::uint64_t seed, int restarts, const std::string& out) {
    auto space = resolve_space(space_name);
    json config = {{"command", "optimize"},
                   {"space", space_name},
                   {"strategy", strategy},
                   {"seed", seed},
                   {"restarts", restarts}};
    auto t0 = std::chrono::steady_clock::now();
    SearchResult result;
    if (strategy == "exhaustive") {
        result = exhaustive_max(space);
    } else if (strategy == "hillclimb") {
        std::mt19937_64 rng(seed);
        result.best_x = -4.0;
        for (int r = 0; r < restarts; ++r) {
            auto run = hill_climb(space, random_assignment(space, rng));
            result.evaluations += run.evaluations;
            if (run.best_x > result.best_x) {
                result.best_x = run.best_x;
                result.best = run.best;
            }
        }
    } else {
        throw ConfigError("unknown strategy: " + strategy + " (exhaustive, hillclimb)");
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json report = {{"provenance", provenance(config, seed)},
                   {"space", space_name},
                   {"strategy", strategy},
                   {"best_x_bi", decimal(result.best_x)},
                   {"evaluations", result.evaluations},
                   {"wall_time_seconds", seconds},
                   {"exceeds_tsirelson", result.best_x > 2 * std::sqrt(2.0)},
                   {"best_lattice", lattice_to_json(apply_assignment(space, result.best))}};
    emit(report, out);
    return 0;
}

int run_hexagon(const std::string& out) {
    json config = {{"command", "hexagon"}};
    auto result = exhaustive_max(hexagon_space());
    json report = {{"provenance", provenance(config, 0)},
                   {"grid_max_x_bi", decimal(result.best_x)},
                   {"reference", 2.82843},
                   {"discrepancy", decimal(result.best_x - 2.82843)},
                   {"note",
                    "soft comparison: the ring arrangement behind the reference "
                    "value is unspecified and mirror-symmetric grid sweeps cap "
                    "at the classical bound 2"},
                   {"best_lattice",
                    lattice_to_json(apply_assignment(hexagon_space(), result.best))}};
    emit(report, out);
    return 0;
}

int run_reproduce_all(const std::vector<std::string>& only, const std::string& out) {
    auto results = reproduce_all(only);
    json rows = json::array();
    bool hard_failure = false;
    std::printf("%-14s %-6s %14s %14s %10s %8s\n", "experiment", "status", "computed",
                "reference", "tolerance", "time");
    for (const auto& r : results) {
        hard_failure |= r.hard && !r.passed;
        std::printf("%-14s %-6s %14.6f %14.6f %10.2e %7.2fs\n", r.id.c_str(),
                    r.passed ? (r.hard ? "pass" : "info") : "FAIL", r.computed,
                    r.reference, r.tolerance, r.seconds);
        rows.push_back({{"id", r.id},
                        {"summary", r.summary},
                        {"passed", r.passed},
                        {"hard", r.hard},
                        {"computed", decimal(r.computed)},
                        {"reference", decimal(r.reference)},
                        {"tolerance", decimal(r.tolerance)},
                        {"seconds", r.seconds},
                        {"details", r.details}});
    }
    if (!out.empty()) {
        json config = {{"command", "reproduce-all"}, {"only", only}};
        emit({{"provenance", provenance(config, 0)}, {"results", rows}}, out);
    }
    return hard_failure ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact laboratory for Bell-type experiments on finite models"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // model check | model eval
    auto* model_cmd = app.add_subcommand("model", "hidden-variable model operations");
    model_cmd->require_subcommand(1);
    std::string model_name, model_out;
    double tolerance = kCheckTolerance;
    auto* model_check = model_cmd->add_subcommand("check", "run every premise check");
    model_check->add_option("--model", model_name, "bb1, dilorenzo or a model file")
        ->required();
    model_check->add_option("--tolerance", tolerance, "verdict tolerance");
    model_check->add_option("--out", model_out, "report path (default stdout)");
    auto* model_eval = model_cmd->add_subcommand("eval", "composed table and CHSH");
    model_eval->add_option("--model", model_name, "bb1, dilorenzo or a model file")
        ->required();
    model_eval->add_option("--out", model_out, "report path (default stdout)");

    // lattice eval | lattice scan
    auto* lattice_cmd = app.add_subcommand("lattice", "spin-lattice operations");
    lattice_cmd->require_subcommand(1);
    LatticeArgs lattice_args;
    std::string lattice_out;
    auto add_lattice_flags = [&](CLI::App* cmd) {
        cmd->add_option("--preset", lattice_args.preset, "ladder10 or hexagon6");
        cmd->add_option("--lattice-file", lattice_args.file, "lattice definition file");
        cmd->add_option("--beta", lattice_args.beta, "inverse temperature")
            ->check(CLI::PositiveNumber)
            ->trigger_on_parse()
            ->each([&](const std::string&) { lattice_args.beta_set = true; });
        cmd->add_option("--J", lattice_args.coupling, "homogeneous coupling")
            ->trigger_on_parse()
            ->each([&](const std::string&) { lattice_args.coupling_set = true; });
        cmd->add_option("--out", lattice_out, "output path (default stdout)");
    };
    auto* lattice_eval =
        lattice_cmd->add_subcommand("eval", "conditional table and CHSH at one point");
    add_lattice_flags(lattice_eval);
    auto* lattice_scan =
        lattice_cmd->add_subcommand("scan", "X_BI(beta) curve as comma-separated rows");
    add_lattice_flags(lattice_scan);

    // optimize
    auto* optimize_cmd = app.add_subcommand("optimize", "coupling-space search");
    std::string space_name = "paper-grid", strategy = "exhaustive", optimize_out;
    std::uint64_t seed = 0;
    int restarts = 100;
    optimize_cmd->add_option("--space", space_name,
                             "paper-grid, hexagon or a search-space file");
    optimize_cmd->add_option("--strategy", strategy, "exhaustive or hillclimb");
    optimize_cmd->add_option("--seed", seed, "restart seed (hillclimb)");
    optimize_cmd->add_option("--restarts", restarts, "restart count (hillclimb)")
        ->check(CLI::PositiveNumber);
    optimize_cmd->add_option("--out", optimize_out, "report path (default stdout)");

    // hexagon
    auto* hexagon_cmd = app.add_subcommand("hexagon", "six-spin ring sweep (soft)");
    std::string hexagon_out;
    hexagon_cmd->add_option("--out", hexagon_out, "report path (default stdout)");

    // reproduce-all
    auto* repro_cmd =
        app.add_subcommand("reproduce-all", "run every reproduction experiment");
    std::vector<std::string> only;
    std::string repro_out;
    repro_cmd->add_option("--only", only, "restrict to the named experiments");
    repro_cmd->add_option("--out", repro_out, "summary report path");

    try {
        app.parse(argc, argv);
        if (model_check->parsed()) return run_model_check(model_name, tolerance, model_out);
        if (model_eval->parsed()) return run_model_eval(model_name, model_out);
        if (lattice_eval->parsed()) return run_lattice_eval(lattice_args, lattice_out);
        if (lattice_scan->parsed()) return run_lattice_scan(lattice_args, lattice_out);
        if (optimize_cmd->parsed())
            return run_optimize(space_name, strategy, seed, restarts, optimize_out);
        if (hexagon_cmd->parsed()) return run_hexagon(hexagon_out);
        if (repro_cmd->parsed()) return run_reproduce_all(only, repro_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "validation failure: %s\n", e.what());
        return 1;
    }
}
