#include "nls/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

namespace nls {

namespace fs = std::filesystem;

namespace {

template <typename T>
void put_le(std::string& out, std::size_t offset, T value)
{
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    std::memcpy(out.data() + offset, bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::string_view in, std::size_t offset)
{
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), in.data() + offset, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

nlohmann::json optional_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

std::string encode_snapshot(const ComplexField& u, double t)
{
    const auto count = static_cast<std::size_t>(u.values.size());
    std::string out(snapshot_header_size + 16 * count, '\0');
    std::memcpy(out.data(), "NLSF", 4);
    put_le<std::uint32_t>(out, 4, snapshot_version);
    put_le<std::uint32_t>(out, 8, static_cast<std::uint32_t>(u.grid.dim));
    put_le<std::uint32_t>(out, 12, static_cast<std::uint32_t>(u.grid.points));
    put_le<double>(out, 16, u.grid.length);
    put_le<double>(out, 24, t);
    for (std::size_t i = 0; i < count; ++i) {
        put_le<double>(out, snapshot_header_size + 16 * i, u.values(i).real());
        put_le<double>(out, snapshot_header_size + 16 * i + 8, u.values(i).imag());
    }
    return out;
}

Snapshot decode_snapshot(std::string_view bytes)
{
    if (bytes.size() < snapshot_header_size || bytes.substr(0, 4) != "NLSF")
        throw ConfigError("not a snapshot file (bad magic)");
    const auto version = get_le<std::uint32_t>(bytes, 4);
    if (version != snapshot_version)
        throw ConfigError("unsupported snapshot version " + std::to_string(version));
    const auto dim = get_le<std::uint32_t>(bytes, 8);
    const auto points = get_le<std::uint32_t>(bytes, 12);
    const auto length = get_le<double>(bytes, 16);
    Snapshot s;
    s.t = get_le<double>(bytes, 24);
    GridSpec g;
    try {
        g = make_grid(static_cast<int>(dim), static_cast<int>(points), length);
    } catch (const InvalidGrid& e) {
        throw ConfigError(std::string("snapshot header: ") + e.what());
    }
    const auto count = static_cast<std::size_t>(g.size());
    if (bytes.size() != snapshot_header_size + 16 * count)
        throw ConfigError("snapshot size does not match its header");
    s.field = ComplexField(g);
    for (std::size_t i = 0; i < count; ++i) {
        s.field.values(i) = cplx(get_le<double>(bytes, snapshot_header_size + 16 * i),
                                 get_le<double>(bytes, snapshot_header_size + 16 * i + 8));
    }
    return s;
}

void write_snapshot(const fs::path& path, const ComplexField& u, double t)
{
    atomic_write(path, encode_snapshot(u, t));
}

Snapshot read_snapshot(const fs::path& path)
{
    return decode_snapshot(read_file(path));
}

void atomic_write(const fs::path& path, std::string_view contents)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string sha256_file(const fs::path& path)
{
    return sha256_hex(read_file(path));
}

ManifestEntry manifest_entry(const fs::path& dir, const std::string& file)
{
    ManifestEntry m;
    m.file = file;
    m.sha256 = sha256_file(dir / file);
    m.bytes = fs::file_size(dir / file);
    return m;
}

std::string dump_json(const nlohmann::json& j)
{
    return j.dump(2) + "\n";
}

nlohmann::json to_json(const EquationParams& p)
{
    return {{"n", p.n}, {"p", p.p}, {"gamma", p.gamma}, {"lambda1", p.lambda1}, {"lambda2", p.lambda2}};
}

nlohmann::json to_json(const GridSpec& g)
{
    return {{"n", g.dim}, {"N", g.points}, {"L", g.length}};
}

nlohmann::json to_json(const EvolutionConfig& c)
{
    return {{"dt", c.dt},
            {"t_end", c.t_end},
            {"cadence", c.cadence},
            {"guard_amplitude", c.guard_amplitude},
            {"guard_gradient_factor", c.guard_gradient_factor},
            {"dealias", c.dealias}};
}

nlohmann::json to_json(const SharpConstants& c)
{
    return {{"kind", to_string(c.kind)}, {"n", c.n},         {"exponent", c.exponent},
            {"C", c.C},                  {"E_tilde", c.E_tilde}, {"mass", c.mass},
            {"kinetic", c.kinetic},      {"potential", c.potential}};
}

SharpConstants sharp_constants_from_json(const nlohmann::json& j)
{
    try {
        SharpConstants c;
        const auto kind = j.at("kind").get<std::string>();
        if (kind != "R" && kind != "W") throw ConfigError("unknown ground-state kind " + kind);
        c.kind = kind == "R" ? GroundStateKind::R : GroundStateKind::W;
        c.n = j.at("n").get<int>();
        c.exponent = j.at("exponent").get<double>();
        c.C = j.at("C").get<double>();
        c.E_tilde = j.at("E_tilde").get<double>();
        c.mass = j.at("mass").get<double>();
        c.kinetic = j.at("kinetic").get<double>();
        c.potential = j.at("potential").get<double>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed constants record: ") + e.what());
    }
}

nlohmann::json to_json(const GroundState& gs)
{
    return {{"kind", to_string(gs.kind)},
            {"n", gs.n},
            {"exponent", gs.exponent},
            {"mu", gs.mu},
            {"method", gs.method},
            {"mass", gs.mass},
            {"kinetic", gs.kinetic},
            {"potential", gs.potential},
            {"residual", gs.residual},
            {"iterations", gs.iterations},
            {"edge_ratio", gs.edge_ratio}};
}

nlohmann::json to_json(const DatumStats& s)
{
    nlohmann::json j = {{"mass", s.mass},         {"energy", s.energy},   {"kinetic", s.kinetic},
                        {"variance", s.variance}, {"virial", s.virial}};
    j["radial"] = s.radial ? nlohmann::json(*s.radial) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const ThetaReport& t)
{
    return {{"value", t.value}, {"attains_negative", t.attains_negative}, {"root", optional_json(t.root)}};
}

nlohmann::json to_json(const CaseEntry& c)
{
    nlohmann::json thresholds = nlohmann::json::array();
    for (const auto& th : c.thresholds) {
        thresholds.push_back(
            {{"label", th.label}, {"lhs", th.lhs}, {"relation", th.relation}, {"rhs", th.rhs}, {"holds", th.holds}});
    }
    nlohmann::json j = {{"family", c.family},
                        {"id", c.id},
                        {"status", to_string(c.status)},
                        {"thresholds", thresholds},
                        {"notes", c.notes}};
    j["A"] = optional_json(c.A);
    if (!c.A_symbolic.empty()) j["A_symbolic"] = c.A_symbolic;
    if (c.theta) j["theta"] = to_json(*c.theta);
    return j;
}

nlohmann::json to_json(const RegimeReport& r)
{
    auto family = [](const std::vector<CaseEntry>& entries) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& e : entries) a.push_back(to_json(e));
        return a;
    };
    nlohmann::json j = {{"params", to_json(r.params)},
                        {"verdict", r.verdict()},
                        {"gwp", family(r.gwp)},
                        {"scattering", family(r.scattering)},
                        {"blowup", family(r.blowup)},
                        {"exclusive", r.exclusive},
                        {"indeterminate_band", r.indeterminate_band},
                        {"notes", r.notes}};
    j["stats"] = r.stats ? to_json(*r.stats) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const BlowupReport& b)
{
    nlohmann::json j = {{"fired", b.fired},
                        {"reason", b.reason},
                        {"window_start", b.window_start},
                        {"window_end", b.window_end},
                        {"theta_root", optional_json(b.theta_root)}};
    j["within_theta_bound"] = b.within_theta_bound ? nlohmann::json(*b.within_theta_bound) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const VirialClosure& c)
{
    return {{"samples", c.t.size()},
            {"clear_samples", c.clear_count},
            {"max_rel_error", c.max_rel_error},
            {"max_rel_error_clear", c.max_rel_error_clear},
            {"boundary_clear", c.boundary_clear}};
}

nlohmann::json to_json(const ScatteringMonitor::Report& r)
{
    return {{"label", r.label},
            {"t", r.t},
            {"cauchy_h1", r.cauchy},
            {"potential", r.potential},
            {"monotone_tail", r.monotone_tail},
            {"potential_decay", r.potential_decay},
            {"scattering_consistent", r.scattering_consistent}};
}

nlohmann::json to_json(const ManifestEntry& m)
{
    return {{"file", m.file}, {"sha256", m.sha256}, {"bytes", m.bytes}};
}

std::string profile_csv(const RadialProfile& profile)
{
    std::ostringstream os;
    os << "r,value,slope\n" << std::setprecision(17);
    for (std::size_t i = 0; i < profile.r.size(); ++i)
        os << profile.r[i] << ',' << profile.value[i] << ',' << profile.slope[i] << '\n';
    return os.str();
}

} // namespace nls
