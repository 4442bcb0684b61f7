#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nls/classifier.hpp"
#include "nls/diagnostics.hpp"
#include "nls/dynamics.hpp"
#include "nls/ground_state.hpp"

namespace nls {

/// Snapshot layout: a 64-byte header followed by N^n complex samples as
/// little-endian float64 pairs (re, im) in row-major order.
///
///   offset  size  field
///        0     4  magic "NLSF"
///        4     4  version (uint32, currently 1)
///        8     4  n (uint32)
///       12     4  N (uint32)
///       16     8  L (float64)
///       24     8  t (float64)
///       32    32  reserved, zero
inline constexpr std::size_t snapshot_header_size = 64;
inline constexpr std::uint32_t snapshot_version = 1;

struct Snapshot {
    ComplexField field;
    double t = 0.0;
};

std::string encode_snapshot(const ComplexField& u, double t);
Snapshot decode_snapshot(std::string_view bytes);

/// Atomic: the file appears complete or not at all.
void write_snapshot(const std::filesystem::path& path, const ComplexField& u, double t);
/// Throws ConfigError for a missing file, a bad magic or version, or a size
/// that does not match the header.
Snapshot read_snapshot(const std::filesystem::path& path);

/// Writes to a temporary sibling, then renames over the target.
void atomic_write(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// One manifest entry: a file relative to the run directory.
struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

ManifestEntry manifest_entry(const std::filesystem::path& dir, const std::string& file);

/// Pretty-printed JSON. nlohmann writes the shortest decimal that reads back
/// to the same double, so values round-trip exactly.
std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const EquationParams& p);
nlohmann::json to_json(const GridSpec& g);
nlohmann::json to_json(const EvolutionConfig& c);
nlohmann::json to_json(const SharpConstants& c);
SharpConstants sharp_constants_from_json(const nlohmann::json& j);
/// Scalars and residuals; the profile or field is stored separately.
nlohmann::json to_json(const GroundState& gs);
nlohmann::json to_json(const DatumStats& s);
nlohmann::json to_json(const CaseEntry& c);
nlohmann::json to_json(const RegimeReport& r);
nlohmann::json to_json(const ThetaReport& t);
nlohmann::json to_json(const BlowupReport& b);
nlohmann::json to_json(const VirialClosure& c);
nlohmann::json to_json(const ScatteringMonitor::Report& r);
nlohmann::json to_json(const ManifestEntry& m);

/// Radial profile as CSV with columns r, value, slope.
std::string profile_csv(const RadialProfile& profile);

} // namespace nls
