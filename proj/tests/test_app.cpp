#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "nls/acceptance.hpp"
#include "nls/cache.hpp"
#include "nls/config.hpp"
#include "nls/io.hpp"
#include "nls/run.hpp"

using namespace nls;
namespace fs = std::filesystem;

namespace {

const char* base_ini = R"(
[equation]
n = 3
p = 2
gamma = 2.5
lambda1 = 1
lambda2 = 1
[grid]
points = 16
length = 16
[datum]
family = gaussian
amplitude = 0.5
width = 1.5
[evolution]
dt = 0.01
t_end = 0.05
[diagnostics]
cadence = 1
[output]
directory = out
)";

RunConfig parse(const std::string& text, const fs::path& base = ".")
{
    std::istringstream in(text);
    return parse_run_config(in, base);
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("nls_lab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config parses the base file")
{
    const RunConfig c = parse(base_ini);
    CHECK(c.equation.gamma == 2.5);
    CHECK(c.grid.points == 16);
    CHECK(c.datum.family == "gaussian");
    CHECK(c.evolution.cadence == 1);
    CHECK(c.output.directory == fs::path(".") / "out");
}

TEST_CASE("config rejects unknown keys and sections")
{
    CHECK_THROWS_AS(parse(replace(base_ini, "width = 1.5", "width = 1.5\nwidht = 2")), ConfigError);
    CHECK_THROWS_AS(parse(std::string(base_ini) + "[extras]\nx = 1\n"), ConfigError);
}

TEST_CASE("config rejects missing keys, bad numbers and bad families")
{
    CHECK_THROWS_AS(parse(replace(base_ini, "dt = 0.01\n", "")), ConfigError);
    CHECK_THROWS_AS(parse(replace(base_ini, "amplitude = 0.5", "amplitude = half")), ConfigError);
    CHECK_THROWS_AS(parse(replace(base_ini, "family = gaussian", "family = square")), ConfigError);
    CHECK_THROWS_AS(parse(replace(base_ini, "dt = 0.01", "dt = -0.01")), Error);
}

TEST_CASE("snapshot round trip is bit exact")
{
    const auto g = make_grid(3, 8, 4.0);
    ComplexField u(g);
    for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = cplx(0.1 * double(i), -1.0 / (1.0 + double(i)));
    u.values[0] = cplx(-0.0, 4.9e-324);
    const Snapshot s = decode_snapshot(encode_snapshot(u, 0.25));
    CHECK(s.t == 0.25);
    CHECK(s.field.grid.points == 8);
    CHECK(s.field.grid.length == 4.0);
    CHECK(std::memcmp(s.field.values.data(), u.values.data(), sizeof(cplx) * std::size_t(u.values.size())) == 0);
}

TEST_CASE("snapshot decoding rejects bad magic, version and size")
{
    const auto g = make_grid(2, 4, 2.0);
    const std::string good = encode_snapshot(ComplexField(g), 0.0);
    CHECK(good.size() == snapshot_header_size + 16 * 16);
    std::string bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_snapshot(bad), ConfigError);
    bad = good;
    bad[4] = 9;
    CHECK_THROWS_AS(decode_snapshot(bad), ConfigError);
    CHECK_THROWS_AS(decode_snapshot(good.substr(0, good.size() - 1)), ConfigError);
    CHECK_THROWS_AS(decode_snapshot(good.substr(0, 10)), ConfigError);
}

TEST_CASE("sha256 of a known string")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("zero-duration run records one sample and a checksummed manifest")
{
    const fs::path dir = scratch("zero");
    RunConfig c = parse(replace(base_ini, "t_end = 0.05", "t_end = 0"), dir);
    const RunRecord r = run_evolve(c);
    CHECK(r.termination == Termination::completed);
    CHECK(r.t_final == 0.0);
    CHECK(r.steps == 0);
    CHECK(r.series.size() == 1);
    CHECK(r.mass_drift == 0.0);
    REQUIRE_FALSE(r.manifest.empty());
    for (const auto& m : r.manifest) {
        const fs::path f = dir / "out" / m.file;
        REQUIRE(fs::exists(f));
        CHECK(sha256_file(f) == m.sha256);
        CHECK(fs::file_size(f) == m.bytes);
    }
    CHECK(fs::exists(dir / "out" / "record.json"));
}

TEST_CASE("short run conserves mass and writes the final snapshot at t_end")
{
    const fs::path dir = scratch("short");
    const RunRecord r = run_evolve(parse(base_ini, dir));
    CHECK(r.series.size() == 6);
    CHECK(r.mass_drift < 1e-12);
    const Snapshot s = read_snapshot(dir / "out" / "snapshot_final.nlsf");
    CHECK(s.t == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("ground-state cache stores, keys and reloads")
{
    const GroundStateCache cache(scratch("cache"));
    const auto req = default_request(GroundStateKind::R, 3, 1.0);
    CHECK_FALSE(cache.load(req).has_value());
    const auto stored = cache.store(req, compute_ground_state(req));
    const auto hit = cache.load(req);
    REQUIRE(hit.has_value());
    CHECK(hit->constants.C == stored.constants.C);
    CHECK(hit->record["key"] == req.key());

    auto other = req;
    other.tol = 1e-7;
    CHECK(other.key() != req.key());
    CHECK_FALSE(cache.load(other).has_value());
}

TEST_CASE("W ground state needs gamma below n")
{
    auto req = default_request(GroundStateKind::W, 3, 3.5);
    CHECK_THROWS_AS(req.validate(), InvalidExponent);
}

TEST_CASE("missing constants hint names the ground-state command")
{
    EquationParams P;
    P.n = 3;
    P.p = 1.0;
    P.gamma = 2.0;
    P.lambda1 = 1.0;
    P.lambda2 = -1.0;
    REQUIRE(constants_needed(P).W);
    const std::string hint = missing_constants_hint(P, {});
    CHECK(hint.find("nls_lab ground-state W --n 3 --gamma 2") != std::string::npos);
    CHECK(hint.find("--compute-constants") != std::string::npos);

    P.n = 4;
    CHECK(missing_constants_hint(P, {}).find("--constants") != std::string::npos);
}

TEST_CASE("missing constants are not computed unless asked")
{
    const GroundStateCache cache(scratch("empty_cache"));
    EquationParams P;
    P.n = 3;
    P.p = 1.0;
    P.gamma = 2.0;
    P.lambda1 = 1.0;
    P.lambda2 = -1.0;
    const auto c = load_constants(P, cache, false);
    CHECK_FALSE(c.W.has_value());
}

TEST_CASE("unknown suite names are rejected")
{
    CHECK_THROWS_AS(suite_criteria("medium"), ConfigError);
    CHECK(suite_criteria("fast").size() < suite_criteria("full").size());
}
