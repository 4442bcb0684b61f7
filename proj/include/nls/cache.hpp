#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "nls/classifier.hpp"
#include "nls/ground_state.hpp"

namespace nls {

/// Everything that determines a ground-state computation.
struct GroundStateRequest {
    GroundStateKind kind = GroundStateKind::R;
    int n = 3;
    /// p for R, gamma for W.
    double exponent = 2.0;
    /// "shoot" (R only) or "flow".
    std::string method = "shoot";
    /// Flow grid; ignored by shooting.
    GridSpec grid = make_grid(3, 96, 32.0);
    /// Shooting residual tolerance or flow fixed-point tolerance.
    double tol = 1e-6;
    double edge_tolerance = 1e-4;

    /// Throws InvalidParameter for an unknown method or shooting for W.
    void validate() const;
    /// (kind, n, exponent, method, grid fingerprint, tolerance) as a file stem.
    std::string key() const;
};

/// Requests the classifier uses for its threshold constants: shooting for
/// R, the flow on a 96^3 box of length 32 for W.
GroundStateRequest default_request(GroundStateKind kind, int n, double exponent);

GroundState compute_ground_state(const GroundStateRequest& request);

struct CachedGroundState {
    nlohmann::json record;
    SharpConstants constants;
    std::filesystem::path record_path;
};

/// $NLS_LAB_CACHE when set, else .nls_lab_cache in the working directory.
std::filesystem::path default_cache_dir();

/// Ground-state records on disk, one JSON file per request key plus the
/// profile (CSV) or field (snapshot). Writes are atomic.
class GroundStateCache {
public:
    explicit GroundStateCache(std::filesystem::path dir = default_cache_dir()) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }
    std::optional<CachedGroundState> load(const GroundStateRequest& request) const;
    CachedGroundState store(const GroundStateRequest& request, const GroundState& gs) const;

private:
    std::filesystem::path dir_;
};

/// JSON record of a computed ground state: request, scalars, Pohozaev
/// residuals and sharp constants.
nlohmann::json ground_state_record(const GroundStateRequest& request, const GroundState& gs);

/// Which constants the threshold cases for these parameters would need.
struct ConstantsNeed {
    bool R = false;
    bool W = false;
};

ConstantsNeed constants_needed(const EquationParams& params);

/// Constants for the threshold cases, read from the cache. Missing entries
/// are computed and stored when compute_missing is set, else left unset
/// (classification with stats then throws MissingConstants). Dimensions
/// above 3 are never computed.
ClassifierConstants load_constants(const EquationParams& params, const GroundStateCache& cache, bool compute_missing);

/// Command that fills the cache entry a classification is missing.
std::string missing_constants_hint(const EquationParams& params, const ClassifierConstants& have);

} // namespace nls
