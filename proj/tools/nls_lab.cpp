// nls_lab: ground states, evolutions, regime classification and the
// verification suite from the command line.
//
// Exit codes: 0 success, 1 invalid arguments or config, 2 no convergence or
// boundary contamination, 3 non-finite evolution, 4 missing ground-state
// constants, 5 verification failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "nls/acceptance.hpp"
#include "nls/cache.hpp"
#include "nls/classifier.hpp"
#include "nls/config.hpp"
#include "nls/io.hpp"
#include "nls/run.hpp"

namespace fs = std::filesystem;
using namespace nls;

namespace {

enum Exit { ok = 0, invalid = 1, no_convergence = 2, nonfinite = 3, missing_constants = 4, verify_failed = 5 };

/// Thrown for missing constants in classify, carrying the hint.
struct MissingConstantsWithHint : MissingConstants {
    MissingConstantsWithHint(const std::string& what, std::string hint) : MissingConstants(what), hint(std::move(hint)) {}
    std::string hint;
};

void emit(const std::string& out, const std::string& text)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        atomic_write(out, text);
}

// ---------------------------------------------------------------- ground-state

struct GroundStateArgs {
    std::string kind;
    int n = 3;
    std::optional<double> p, gamma;
    std::string method;
    std::optional<int> points;
    std::optional<double> length, tol, edge_tol;
    std::string out;
    bool no_cache = false;
};

int cmd_ground_state(const GroundStateArgs& a)
{
    const GroundStateKind kind = a.kind == "R" ? GroundStateKind::R : GroundStateKind::W;
    const auto& exponent = kind == GroundStateKind::R ? a.p : a.gamma;
    if (!exponent) throw InvalidParameter(kind == GroundStateKind::R ? "R needs --p" : "W needs --gamma");
    GroundStateRequest req = default_request(kind, a.n, *exponent);
    if (!a.method.empty()) req.method = a.method;
    if (a.points || a.length)
        req.grid = make_grid(a.n, a.points.value_or(req.grid.points), a.length.value_or(req.grid.length));
    if (a.tol) req.tol = *a.tol;
    if (a.edge_tol) req.edge_tolerance = *a.edge_tol;
    req.validate();

    const GroundStateCache cache;
    std::optional<CachedGroundState> entry;
    if (!a.no_cache) entry = cache.load(req);
    if (entry) {
        std::cout << "cache hit: " << entry->record_path.string() << "\n";
    } else {
        const GroundState gs = compute_ground_state(req);
        entry = a.no_cache ? CachedGroundState{ground_state_record(req, gs), sharp_constants(gs), {}}
                           : cache.store(req, gs);
        if (!a.no_cache) std::cout << "computed and cached: " << entry->record_path.string() << "\n";
        if (!a.out.empty()) {
            fs::create_directories(a.out);
            if (!gs.profile.empty()) atomic_write(fs::path(a.out) / "profile.csv", profile_csv(gs.profile));
            if (gs.field) write_snapshot(fs::path(a.out) / "field.nlsf", *gs.field, 0.0);
        }
    }
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        if (entry->record.contains("profile_file"))
            fs::copy_file(cache.dir() / entry->record["profile_file"].get<std::string>(), fs::path(a.out) / "profile.csv",
                          fs::copy_options::overwrite_existing);
        if (entry->record.contains("field_file"))
            fs::copy_file(cache.dir() / entry->record["field_file"].get<std::string>(), fs::path(a.out) / "field.nlsf",
                          fs::copy_options::overwrite_existing);
        atomic_write(fs::path(a.out) / "record.json", dump_json(entry->record));
    }
    const auto& r = entry->record;
    std::cout << dump_json({{"key", r["key"]},
                            {"pohozaev_residual", r["pohozaev_residual"]},
                            {"constants", r["constants"]}});
    return ok;
}

// ---------------------------------------------------------------- evolve

int cmd_evolve(const std::string& config_path, bool compute_constants)
{
    const RunConfig cfg = load_run_config(config_path);
    const GroundStateCache cache;
    RunOptions opt;
    opt.cache = &cache;
    opt.compute_constants = compute_constants;
    opt.log = &std::cerr;
    const RunRecord rec = run_evolve(cfg, opt);
    std::cout << rec.verdict() << "\n";
    if (rec.termination == Termination::nonfinite) {
        std::cerr << "error: the evolution produced non-finite values at t = " << rec.t_final << "\n";
        return nonfinite;
    }
    return ok;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
    int n = 3;
    double p = 2.0, gamma = 2.0, lambda1 = 1.0, lambda2 = 1.0;
    std::optional<double> mass, energy, kinetic;
    std::string radial = "unknown";
    std::string config;
    std::vector<std::string> constants_files;
    bool compute_constants = false;
    std::string out;
    bool sweep = false;
    std::vector<double> p_values, gamma_values;
    int jobs = 1;
};

EquationParams classify_params(const ClassifyArgs& a)
{
    EquationParams P;
    P.n = a.n;
    P.p = a.p;
    P.gamma = a.gamma;
    P.lambda1 = a.lambda1;
    P.lambda2 = a.lambda2;
    return P;
}

std::optional<bool> radial_flag(const std::string& s)
{
    if (s == "yes") return true;
    if (s == "no") return false;
    return std::nullopt;
}

/// Constants from --constants files: ground-state records or bare
/// constants objects.
ClassifierConstants constants_from_files(const std::vector<std::string>& files)
{
    ClassifierConstants c;
    for (const auto& f : files) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(f));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(f + ": " + e.what());
        }
        const auto sc = sharp_constants_from_json(j.contains("constants") ? j["constants"] : j);
        (sc.kind == GroundStateKind::R ? c.R : c.W) = sc;
    }
    return c;
}

int cmd_classify(const ClassifyArgs& a)
{
    EquationParams P = classify_params(a);
    std::optional<DatumStats> stats;
    if (!a.config.empty()) {
        const RunConfig cfg = load_run_config(a.config);
        P = cfg.equation;
        stats = datum_stats(make_datum(cfg), P, cfg.datum.radial);
    }
    const int given = int(a.mass.has_value()) + int(a.energy.has_value()) + int(a.kinetic.has_value());
    if (given != 0) {
        if (given != 3) throw InvalidParameter("datum statistics need all of --mass, --energy and --kinetic");
        if (stats) throw InvalidParameter("give either --config or datum statistics, not both");
        DatumStats s;
        s.mass = *a.mass;
        s.energy = *a.energy;
        s.kinetic = *a.kinetic;
        s.radial = radial_flag(a.radial);
        stats = s;
    }
    validate_classifier_params(P);

    ClassifierConstants constants = constants_from_files(a.constants_files);
    const GroundStateCache cache;
    if (stats) {
        const auto cached = load_constants(P, cache, a.compute_constants);
        if (!constants.R) constants.R = cached.R;
        if (!constants.W) constants.W = cached.W;
    }
    try {
        emit(a.out, dump_json(to_json(classify(P, stats, constants))));
    } catch (const MissingConstants& e) {
        throw MissingConstantsWithHint(e.what(), missing_constants_hint(P, constants));
    }
    return ok;
}

int cmd_sweep(const ClassifyArgs& a)
{
    if (a.p_values.empty() || a.gamma_values.empty())
        throw InvalidParameter("sweep needs --p-values and --gamma-values");
    if (a.jobs < 1) throw InvalidParameter("--jobs must be >= 1");
    const EquationParams base = classify_params(a);
    std::optional<RunConfig> cfg;
    if (!a.config.empty()) cfg = load_run_config(a.config);

    std::vector<std::pair<double, double>> cells;
    for (double p : a.p_values)
        for (double g : a.gamma_values) cells.emplace_back(p, g);
    std::vector<SweepCell> results(cells.size());

    // Cells are independent; each worker owns its constants cache and
    // writes only its own result slots.
    auto worker = [&](int w) {
        ConstantsCache cache;
        for (std::size_t i = w; i < cells.size(); i += a.jobs) {
            SweepOptions opt;
            opt.p_values = {cells[i].first};
            opt.gamma_values = {cells[i].second};
            if (cfg) {
                opt.datum = [&](const EquationParams& P) {
                    RunConfig c = *cfg;
                    c.equation = P;
                    return make_datum(c);
                };
            }
            results[i] = sweep(base, opt, cache).front();
        }
    };
    std::vector<std::thread> threads;
    for (int w = 1; w < a.jobs; ++w) threads.emplace_back(worker, w);
    worker(0);
    for (auto& t : threads) t.join();

    std::ostringstream csv;
    write_sweep_csv(csv, results);
    emit(a.out, csv.str());
    return ok;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, const std::string& json_out, const std::string& work_dir,
               const std::string& mutate, const std::vector<std::string>& only)
{
    suite_criteria(suite);
    SuiteOptions opt;
    opt.only = only;
    if (!work_dir.empty()) opt.work_dir = work_dir;
    if (!mutate.empty()) {
        if (mutate != "energy") throw InvalidParameter("unknown mutation '" + mutate + "'");
        opt.mutate_energy = true;
    }
    const bool json_stdout = json_out == "-";
    opt.on_result = [&](const CriterionResult& r) {
        (json_stdout ? std::cerr : std::cout) << format_result(r) << std::endl;
    };
    const auto results = run_suite(suite, opt);
    const auto summary = to_json(results);
    if (!json_out.empty()) emit(json_out, dump_json(summary));
    return summary["passed"].get<bool>() ? ok : verify_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral laboratory for NLS with power and Hartree nonlinearities"};
    app.require_subcommand(1);

    GroundStateArgs gs;
    auto* gs_cmd = app.add_subcommand("ground-state", "Compute R or W and its sharp constants (cached)");
    gs_cmd->add_option("kind", gs.kind, "R or W")->required()->check(CLI::IsMember({"R", "W"}));
    gs_cmd->add_option("--n", gs.n, "Dimension")->default_val(3);
    gs_cmd->add_option("--p", gs.p, "Power exponent (R)");
    gs_cmd->add_option("--gamma", gs.gamma, "Hartree exponent (W)");
    gs_cmd->add_option("--method", gs.method, "shoot (R only) or flow; default shoot for R, flow for W")
        ->check(CLI::IsMember({"shoot", "flow"}));
    gs_cmd->add_option("--N", gs.points, "Flow grid points per axis (default 96)");
    gs_cmd->add_option("--L", gs.length, "Flow box length (default 32)");
    gs_cmd->add_option("--tol", gs.tol, "Shooting residual or flow fixed-point tolerance");
    gs_cmd->add_option("--edge-tol", gs.edge_tol, "Largest accepted edge amplitude of the flow profile");
    gs_cmd->add_option("--out", gs.out, "Directory for record.json and the profile or field");
    gs_cmd->add_flag("--no-cache", gs.no_cache, "Neither read nor write the cache");

    std::string config_path;
    bool evolve_constants = false;
    auto* ev_cmd = app.add_subcommand("evolve", "Run an evolution from a config file");
    ev_cmd->add_option("config", config_path, "INI run configuration")->required();
    ev_cmd->add_flag("--compute-constants", evolve_constants, "Compute ground-state constants missing from the cache");

    ClassifyArgs ca;
    auto* cl_cmd = app.add_subcommand("classify", "Classify parameters and datum statistics into regimes");
    cl_cmd->add_option("--n", ca.n, "Dimension")->default_val(3);
    cl_cmd->add_option("--p", ca.p, "Power exponent")->default_val(2.0);
    cl_cmd->add_option("--gamma", ca.gamma, "Hartree exponent")->default_val(2.0);
    cl_cmd->add_option("--lambda1", ca.lambda1, "Power coupling")->default_val(1.0);
    cl_cmd->add_option("--lambda2", ca.lambda2, "Hartree coupling")->default_val(1.0);
    cl_cmd->add_option("--mass", ca.mass, "Datum mass ||u0||^2");
    cl_cmd->add_option("--energy", ca.energy, "Datum energy E(u0)");
    cl_cmd->add_option("--kinetic", ca.kinetic, "Datum ||grad u0||^2");
    cl_cmd->add_option("--radial", ca.radial, "yes, no or unknown")->check(CLI::IsMember({"yes", "no", "unknown"}));
    cl_cmd->add_option("--config", ca.config, "Take parameters and datum from a run configuration");
    cl_cmd->add_option("--constants", ca.constants_files, "Ground-state constants record (JSON); repeatable");
    cl_cmd->add_flag("--compute-constants", ca.compute_constants, "Compute constants missing from the cache");
    cl_cmd->add_option("--out", ca.out, "Output file (default stdout)");
    cl_cmd->add_flag("--sweep", ca.sweep, "Classify a (p, gamma) table and write CSV");
    cl_cmd->add_option("--p-values", ca.p_values, "Sweep p values")->delimiter(',');
    cl_cmd->add_option("--gamma-values", ca.gamma_values, "Sweep gamma values")->delimiter(',');
    cl_cmd->add_option("--jobs", ca.jobs, "Sweep worker threads")->default_val(1);

    std::string suite, json_out, work_dir, mutate;
    std::vector<std::string> only;
    auto* ve_cmd = app.add_subcommand("verify", "Run the acceptance suite (fast or full)");
    ve_cmd->add_option("suite", suite, "fast or full")->required();
    ve_cmd->add_option("--json", json_out, "Write the JSON summary to a file ('-' for stdout)");
    ve_cmd->add_option("--work-dir", work_dir, "Scratch directory for runs that write files");
    ve_cmd->add_option("--only", only, "Run only these criterion ids (comma separated)")->delimiter(',');
    ve_cmd->add_option("--mutate", mutate, "Mutation fixture")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid;
    }

    try {
        if (*gs_cmd) return cmd_ground_state(gs);
        if (*ev_cmd) return cmd_evolve(config_path, evolve_constants);
        if (*cl_cmd) return ca.sweep ? cmd_sweep(ca) : cmd_classify(ca);
        if (*ve_cmd) return cmd_verify(suite, json_out, work_dir, mutate, only);
    } catch (const MissingConstantsWithHint& e) {
        std::cerr << "error: missing constants: " << e.what() << "\nhint: " << e.hint << "\n";
        return missing_constants;
    } catch (const MissingConstants& e) {
        std::cerr << "error: missing constants: " << e.what() << "\n";
        return missing_constants;
    } catch (const NonFinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nonfinite;
    } catch (const NoConvergence& e) {
        std::cerr << "error: no convergence: " << e.what() << "\n";
        return no_convergence;
    } catch (const BoundaryContamination& e) {
        std::cerr << "error: boundary contamination: " << e.what() << "\n";
        return no_convergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invalid;
    }
    return invalid;
}
