#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nls/dynamics.hpp"
#include "nls/ground_state.hpp"
#include "nls/grid.hpp"

namespace nls {

/// Initial datum. Every family is multiplied by amplitude and by the plane
/// wave exp(i momentum . x), and gets optional smooth noise.
///
///  - gaussian: exp(-|x - center|^2 / (2 width^2))
///  - ring: exp(-(|x - center| - radius)^2 / (2 width^2))
///  - ground-state: R(|x|) from shooting (kind R, uses p) or W(x) from the
///    flow on the run grid (kind W, uses gamma); center must be zero
///  - file: a snapshot on the run grid, path relative to the config file
struct DatumSpec {
    std::string family;
    double amplitude = 1.0;
    double width = 1.0;
    double radius = 0.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
    GroundStateKind kind = GroundStateKind::R;
    std::filesystem::path file;
    /// Relative amplitude of a smooth random perturbation drawn from the run
    /// seed; 0 disables it.
    double noise = 0.0;
    /// Caller's radial flag for the classifier; unset lets it check symmetry.
    std::optional<bool> radial;
};

struct DiagnosticsSpec {
    /// Start of the scattering tail; unset uses the second half of the run.
    std::optional<double> tail_start;
    bool scattering = false;
    /// Space-time norm labels among U, V, W, Z.
    std::vector<std::string> norms;
};

struct OutputSpec {
    std::filesystem::path directory;
    /// Snapshot every k-th observer sample besides the first and last;
    /// 0 keeps only those two.
    int snapshot_every = 0;
};

/// A complete run description, read from an INI file with sections
/// [equation], [grid], [datum], [evolution], [diagnostics], [output] and
/// [run]. Unknown sections or keys are errors.
struct RunConfig {
    EquationParams equation;
    GridSpec grid;
    DatumSpec datum;
    EvolutionConfig evolution;
    DiagnosticsSpec diagnostics;
    OutputSpec output;
    std::uint64_t seed = 0;
    std::string label;
    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir;

    /// Throws ConfigError with the offending key on any inconsistency.
    void validate() const;
};

/// Throws ConfigError on syntax errors, unknown keys, missing required keys
/// and values outside the module preconditions.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& c);

/// Builds the initial datum described by the config.
ComplexField make_datum(const RunConfig& c);

/// A * exp(-|x - center|^2 / (2 w^2)) exp(i k . x).
ComplexField gaussian_datum(const GridSpec& g, double amplitude, double width,
                            const std::array<double, 3>& center = {0.0, 0.0, 0.0},
                            const std::array<double, 3>& momentum = {0.0, 0.0, 0.0});

} // namespace nls
