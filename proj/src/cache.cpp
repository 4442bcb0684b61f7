#include "nls/cache.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "nls/io.hpp"

namespace nls {

namespace fs = std::filesystem;

void GroundStateRequest::validate() const
{
    if (method != "shoot" && method != "flow")
        throw InvalidParameter("method must be shoot or flow, got '" + method + "'");
    if (method == "shoot" && kind == GroundStateKind::W)
        throw InvalidParameter("W is only available from the flow solver");
    if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (!(edge_tolerance > 0.0)) throw InvalidParameter("edge tolerance must be positive");
    if (method == "flow" && grid.dim != n) throw InvalidParameter("flow grid dimension must equal n");
    if (kind == GroundStateKind::W && !(exponent > 0.0 && exponent < n)) {
        std::ostringstream os;
        os << "W needs 0 < gamma < n (got gamma = " << exponent << ", n = " << n << ")";
        throw InvalidExponent(os.str());
    }
}

std::string GroundStateRequest::key() const
{
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind) << "-n" << n << "-e" << exponent << "-" << method;
    if (method == "flow") os << "-" << grid.fingerprint() << "-edge" << edge_tolerance;
    os << "-tol" << tol;
    return os.str();
}

GroundStateRequest default_request(GroundStateKind kind, int n, double exponent)
{
    GroundStateRequest r;
    r.kind = kind;
    r.n = n;
    r.exponent = exponent;
    if (kind == GroundStateKind::R) {
        r.method = "shoot";
        r.tol = 1e-6;
        r.grid = make_grid(n, n == 3 ? 96 : 256, 32.0);
    } else {
        r.method = "flow";
        r.tol = 1e-10;
        r.grid = make_grid(n, n == 3 ? 96 : 256, 32.0);
    }
    return r;
}

GroundState compute_ground_state(const GroundStateRequest& request)
{
    request.validate();
    if (request.method == "shoot") return shoot_R(request.n, request.exponent, request.tol);
    FlowOptions options;
    options.tol = request.tol;
    options.edge_tolerance = request.edge_tolerance;
    return flow_ground_state(request.kind, request.n, request.exponent, request.grid, options);
}

fs::path default_cache_dir()
{
    if (const char* env = std::getenv("NLS_LAB_CACHE"); env && *env) return fs::path(env);
    return fs::path(".nls_lab_cache");
}

nlohmann::json ground_state_record(const GroundStateRequest& request, const GroundState& gs)
{
    const auto res = pohozaev_residuals(gs);
    nlohmann::json req = {{"kind", to_string(request.kind)},
                          {"n", request.n},
                          {"exponent", request.exponent},
                          {"method", request.method},
                          {"tol", request.tol}};
    if (request.method == "flow") {
        req["grid"] = to_json(request.grid);
        req["edge_tolerance"] = request.edge_tolerance;
    }
    return {{"key", request.key()},
            {"request", req},
            {"ground_state", to_json(gs)},
            {"pohozaev_residual", {{"kinetic_mass", res.kinetic_mass}, {"potential", res.potential}}},
            {"constants", to_json(sharp_constants(gs))}};
}

std::optional<CachedGroundState> GroundStateCache::load(const GroundStateRequest& request) const
{
    const fs::path path = dir_ / (request.key() + ".json");
    if (!fs::exists(path)) return std::nullopt;
    CachedGroundState c;
    c.record_path = path;
    try {
        c.record = nlohmann::json::parse(read_file(path));
        c.constants = sharp_constants_from_json(c.record.at("constants"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("corrupt cache record " + path.string() + ": " + e.what());
    }
    return c;
}

CachedGroundState GroundStateCache::store(const GroundStateRequest& request, const GroundState& gs) const
{
    CachedGroundState c;
    c.record = ground_state_record(request, gs);
    c.constants = sharp_constants(gs);
    c.record_path = dir_ / (request.key() + ".json");
    if (!gs.profile.empty()) {
        const std::string name = request.key() + ".profile.csv";
        atomic_write(dir_ / name, profile_csv(gs.profile));
        c.record["profile_file"] = name;
    }
    if (gs.field) {
        const std::string name = request.key() + ".nlsf";
        write_snapshot(dir_ / name, *gs.field, 0.0);
        c.record["field_file"] = name;
    }
    // The record goes last so that a reader never sees it without its data.
    atomic_write(c.record_path, dump_json(c.record));
    return c;
}

ConstantsNeed constants_needed(const EquationParams& params)
{
    ConstantsNeed need;
    const auto probe = classify_gwp(params, std::nullopt);
    auto conditional = [&](const std::string& id) {
        return std::any_of(probe.begin(), probe.end(),
                           [&](const CaseEntry& e) { return e.id == id && e.status == CaseStatus::conditional; });
    };
    need.W = conditional("2.3") || conditional("2.5");
    need.R = conditional("3.2") || conditional("3.4");
    return need;
}

ClassifierConstants load_constants(const EquationParams& params, const GroundStateCache& cache, bool compute_missing)
{
    ClassifierConstants out;
    const auto need = constants_needed(params);
    auto fetch = [&](GroundStateKind kind, double exponent) -> std::optional<SharpConstants> {
        const auto request = default_request(kind, params.n, exponent);
        if (auto hit = cache.load(request)) return hit->constants;
        if (!compute_missing || params.n > 3) return std::nullopt;
        return cache.store(request, compute_ground_state(request)).constants;
    };
    if (need.R) out.R = fetch(GroundStateKind::R, params.p);
    if (need.W) out.W = fetch(GroundStateKind::W, params.gamma);
    return out;
}

std::string missing_constants_hint(const EquationParams& params, const ClassifierConstants& have)
{
    const auto need = constants_needed(params);
    std::ostringstream os;
    os.precision(17);
    if (params.n > 3) {
        os << "supply ground-state constants for n = " << params.n << " with --constants FILE";
        return os.str();
    }
    std::string sep;
    os << "run ";
    if (need.R && !have.R) {
        os << "'nls_lab ground-state R --n " << params.n << " --p " << params.p << "'";
        sep = " and ";
    }
    if (need.W && !have.W) os << sep << "'nls_lab ground-state W --n " << params.n << " --gamma " << params.gamma << "'";
    os << " first, or pass --compute-constants";
    return os.str();
}

} // namespace nls
