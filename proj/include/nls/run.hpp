#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nls/cache.hpp"
#include "nls/classifier.hpp"
#include "nls/config.hpp"
#include "nls/diagnostics.hpp"
#include "nls/io.hpp"

namespace nls {

struct RunOptions {
    /// Energy functional of the recorder; empty uses energy_terms.
    EnergyFunction energy;
    /// Ground-state constants for the regime report; without a cache the
    /// report falls back to parameter-only classification when constants
    /// are needed.
    const GroundStateCache* cache = nullptr;
    bool compute_constants = false;
    /// Write series, snapshots and reports to config.output.directory.
    bool write_files = true;
    /// Receives warnings (boundary mass, scope notes); may be null.
    std::ostream* log = nullptr;
};

struct RunRecord {
    RunConfig config;
    Termination termination = Termination::completed;
    double t_final = 0.0;
    long steps = 0;
    ObservableSeries series;
    /// max_t |M(t) - M(0)| / M(0) and the same for E (relative to |E(0)|,
    /// or absolute when E(0) = 0).
    double mass_drift = 0.0;
    double energy_drift = 0.0;
    double gradient_norm_initial = 0.0;
    double gradient_norm_max = 0.0;
    BlowupReport blowup;
    VirialClosure closure;
    std::optional<ScatteringMonitor::Report> scattering;
    std::map<std::string, double> spacetime_norms;
    RegimeReport regime;
    /// Largest max|u| on the boundary shell relative to the peak, over all
    /// samples; above 1e-8 a warning is issued.
    double boundary_amplitude = 0.0;
    std::vector<std::string> warnings;
    std::vector<ManifestEntry> manifest;

    /// One line: termination, time, drifts, detector outcome, regime verdict.
    std::string verdict() const;
};

/// Runs the configured evolution with the observable recorder, the virial
/// closure, the blow-up detector and the optional scattering and space-time
/// monitors. Files written to the output directory: series.csv,
/// snapshot_initial.nlsf, snapshot_NNNNNN.nlsf, snapshot_final.nlsf,
/// detectors.json, regime.json and record.json (with the checksummed
/// manifest of the others). A run that ends with non-finite values is
/// reported through termination; the files are still written.
RunRecord run_evolve(const RunConfig& config, const RunOptions& options = {});

nlohmann::json to_json(const RunRecord& r);

} // namespace nls
