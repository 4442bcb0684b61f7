#include "nls/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "nls/io.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"equation", {"n", "p", "gamma", "lambda1", "lambda2"}},
        {"grid", {"points", "length"}},
        {"datum", {"family", "amplitude", "width", "radius", "center", "momentum", "kind", "file", "noise", "radial"}},
        {"evolution", {"dt", "t_end", "guard_amplitude", "guard_gradient_factor", "dealias"}},
        {"diagnostics", {"cadence", "scattering", "tail_start", "norms"}},
        {"output", {"directory", "snapshot_every"}},
        {"run", {"seed", "label"}},
    };
    return keys;
}

/// Typed access to one section with the key name in every error.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::string text(const std::string& key) const
    {
        if (!has(key)) throw ConfigError("missing required key [" + name_ + "] " + key);
        return tree_->get<std::string>(key);
    }

    double number(const std::string& key) const
    {
        const std::string s = text(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] " + key + ": expected a number, got '" + s + "'");
        }
    }

    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key) const
    {
        const std::string s = text(key);
        try {
            std::size_t used = 0;
            const long v = std::stol(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] " + key + ": expected an integer, got '" + s + "'");
        }
    }

    long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const std::string s = text(key);
        if (s == "true" || s == "yes" || s == "1") return true;
        if (s == "false" || s == "no" || s == "0") return false;
        throw ConfigError("[" + name_ + "] " + key + ": expected true or false, got '" + s + "'");
    }

    std::vector<std::string> list(const std::string& key) const
    {
        std::vector<std::string> out;
        if (!has(key)) return out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) throw ConfigError("[" + name_ + "] " + key + ": empty list entry");
            out.push_back(item.substr(b, e - b + 1));
        }
        return out;
    }

    std::array<double, 3> vector3(const std::string& key, int dim) const
    {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        if (!has(key)) return v;
        const auto items = list(key);
        if (static_cast<int>(items.size()) != dim)
            throw ConfigError("[" + name_ + "] " + key + ": expected " + std::to_string(dim) + " components");
        for (int a = 0; a < dim; ++a) {
            try {
                std::size_t used = 0;
                v[a] = std::stod(items[a], &used);
                if (used != items[a].size() || !std::isfinite(v[a])) throw std::invalid_argument(items[a]);
            } catch (const std::exception&) {
                throw ConfigError("[" + name_ + "] " + key + ": bad component '" + items[a] + "'");
            }
        }
        return v;
    }

private:
    const pt::ptree* tree_;
    std::string name_;
};

Section section(const pt::ptree& root, const std::string& name)
{
    const auto it = root.find(name);
    return Section(it == root.not_found() ? nullptr : &it->second, name);
}

/// Smooth complex noise with unit peak: white noise restricted to |k| below
/// three fundamental modes.
Eigen::ArrayXcd smooth_noise(const GridSpec& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexField white(g);
    for (Eigen::Index i = 0; i < white.values.size(); ++i) white.values(i) = cplx(normal(rng), normal(rng));
    auto coeffs = transform_forward(white);
    const double k_cut = 2.0 * std::numbers::pi * 3.0 / g.length;
    const auto& k2 = spectral_context(g).k_squared();
    for (Eigen::Index i = 0; i < coeffs.values.size(); ++i)
        if (k2(i) > k_cut * k_cut) coeffs.values(i) = 0.0;
    Eigen::ArrayXcd eta = transform_inverse(coeffs).values;
    const double peak = std::sqrt(eta.abs2().maxCoeff());
    if (peak > 0.0) eta /= peak;
    return eta;
}

void apply_plane_wave(ComplexField& u, const std::array<double, 3>& k)
{
    if (k == std::array<double, 3>{0.0, 0.0, 0.0}) return;
    const auto phase = sample(u.grid, [&](const std::array<double, 3>& x) {
        return std::polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    });
    u.values *= phase.values;
}

} // namespace

void RunConfig::validate() const
{
    try {
        equation.validate();
        evolution.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (grid.dim != equation.n) throw ConfigError("[grid] dimension must equal [equation] n");
    const auto& d = datum.family;
    if (d != "gaussian" && d != "ring" && d != "ground-state" && d != "file")
        throw ConfigError("[datum] family: expected gaussian, ring, ground-state or file, got '" + d + "'");
    if ((d == "gaussian" || d == "ring") && !(datum.width > 0.0)) throw ConfigError("[datum] width must be positive");
    if (d == "ring" && !(datum.radius > 0.0)) throw ConfigError("[datum] radius must be positive");
    if (d == "ground-state" && datum.center != std::array<double, 3>{0.0, 0.0, 0.0})
        throw ConfigError("[datum] center must be zero for ground-state data");
    if (!(datum.noise >= 0.0)) throw ConfigError("[datum] noise must be >= 0");
    if (output.directory.empty()) throw ConfigError("missing required key [output] directory");
    if (output.snapshot_every < 0) throw ConfigError("[output] snapshot_every must be >= 0");
    for (const auto& label : diagnostics.norms) {
        if (label != "U" && label != "V" && label != "W" && label != "Z")
            throw ConfigError("[diagnostics] norms: unknown norm '" + label + "'");
    }
}

RunConfig parse_run_config(std::istream& in, const fs::path& base_dir)
{
    pt::ptree root;
    try {
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    for (const auto& [name, tree] : root) {
        const auto it = allowed_keys().find(name);
        if (it == allowed_keys().end()) {
            if (tree.empty()) throw ConfigError("key '" + name + "' outside any section");
            throw ConfigError("unknown section [" + name + "]");
        }
        for (const auto& [key, value] : tree) {
            if (!it->second.count(key)) throw ConfigError("unknown key [" + name + "] " + key);
        }
    }

    RunConfig c;
    c.base_dir = base_dir;

    const auto eq = section(root, "equation");
    c.equation.n = static_cast<int>(eq.integer("n"));
    c.equation.p = eq.number("p");
    c.equation.gamma = eq.number("gamma");
    c.equation.lambda1 = eq.number("lambda1");
    c.equation.lambda2 = eq.number("lambda2");

    const auto gr = section(root, "grid");
    try {
        c.grid = make_grid(c.equation.n, static_cast<int>(gr.integer("points")), gr.number("length"));
    } catch (const InvalidGrid& e) {
        throw ConfigError(std::string("[grid] ") + e.what());
    }

    const auto da = section(root, "datum");
    c.datum.family = da.text("family");
    c.datum.amplitude = da.number("amplitude", 1.0);
    c.datum.width = da.number("width", 1.0);
    c.datum.radius = da.number("radius", 0.0);
    c.datum.center = da.vector3("center", c.equation.n);
    c.datum.momentum = da.vector3("momentum", c.equation.n);
    c.datum.noise = da.number("noise", 0.0);
    if (da.has("radial")) c.datum.radial = da.boolean("radial", false);
    if (c.datum.family == "gaussian" || c.datum.family == "ring") da.text("width");
    if (c.datum.family == "ring") da.text("radius");
    if (c.datum.family == "ground-state") {
        const auto kind = da.text("kind");
        if (kind != "R" && kind != "W") throw ConfigError("[datum] kind: expected R or W, got '" + kind + "'");
        c.datum.kind = kind == "R" ? GroundStateKind::R : GroundStateKind::W;
    } else if (da.has("kind")) {
        throw ConfigError("[datum] kind applies only to ground-state data");
    }
    if (c.datum.family == "file") c.datum.file = da.text("file");

    const auto ev = section(root, "evolution");
    c.evolution.dt = ev.number("dt");
    c.evolution.t_end = ev.number("t_end");
    c.evolution.guard_amplitude = ev.number("guard_amplitude", c.evolution.guard_amplitude);
    c.evolution.guard_gradient_factor = ev.number("guard_gradient_factor", c.evolution.guard_gradient_factor);
    c.evolution.dealias = ev.boolean("dealias", false);

    const auto di = section(root, "diagnostics");
    c.evolution.cadence = static_cast<int>(di.integer("cadence", c.evolution.cadence));
    c.diagnostics.scattering = di.boolean("scattering", false);
    if (di.has("tail_start")) c.diagnostics.tail_start = di.number("tail_start");
    c.diagnostics.norms = di.list("norms");

    const auto out = section(root, "output");
    c.output.directory = out.text("directory");
    if (c.output.directory.is_relative()) c.output.directory = base_dir / c.output.directory;
    c.output.snapshot_every = static_cast<int>(out.integer("snapshot_every", 0));

    const auto run = section(root, "run");
    const long seed = run.integer("seed", 0);
    if (seed < 0) throw ConfigError("[run] seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    if (run.has("label")) c.label = run.text("label");

    c.validate();
    return c;
}

RunConfig load_run_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse_run_config(in, base);
}

nlohmann::json to_json(const RunConfig& c)
{
    const int n = c.equation.n;
    auto vec = [n](const std::array<double, 3>& v) { return std::vector<double>(v.begin(), v.begin() + n); };
    nlohmann::json datum = {{"family", c.datum.family},
                            {"amplitude", c.datum.amplitude},
                            {"width", c.datum.width},
                            {"center", vec(c.datum.center)},
                            {"momentum", vec(c.datum.momentum)},
                            {"noise", c.datum.noise}};
    if (c.datum.family == "ring") datum["radius"] = c.datum.radius;
    if (c.datum.family == "ground-state") datum["kind"] = to_string(c.datum.kind);
    if (c.datum.family == "file") datum["file"] = c.datum.file.string();
    if (c.datum.radial) datum["radial"] = *c.datum.radial;
    nlohmann::json diagnostics = {{"scattering", c.diagnostics.scattering}, {"norms", c.diagnostics.norms}};
    if (c.diagnostics.tail_start) diagnostics["tail_start"] = *c.diagnostics.tail_start;
    return {{"equation", to_json(c.equation)},
            {"grid", to_json(c.grid)},
            {"datum", datum},
            {"evolution", to_json(c.evolution)},
            {"diagnostics", diagnostics},
            {"output", {{"directory", c.output.directory.string()}, {"snapshot_every", c.output.snapshot_every}}},
            {"run", {{"seed", c.seed}, {"label", c.label}}}};
}

ComplexField gaussian_datum(const GridSpec& g, double amplitude, double width, const std::array<double, 3>& center,
                            const std::array<double, 3>& momentum)
{
    auto u = sample(g, [&](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        return amplitude * std::exp(-r2 / (2.0 * width * width));
    });
    apply_plane_wave(u, momentum);
    return u;
}

ComplexField make_datum(const RunConfig& c)
{
    c.validate();
    const auto& d = c.datum;
    const auto& g = c.grid;
    ComplexField u;
    if (d.family == "gaussian") {
        u = gaussian_datum(g, d.amplitude, d.width, d.center, d.momentum);
    } else {
        if (d.family == "ring") {
            u = sample(g, [&](const std::array<double, 3>& x) {
                double r2 = 0.0;
                for (int a = 0; a < 3; ++a) r2 += (x[a] - d.center[a]) * (x[a] - d.center[a]);
                const double s = std::sqrt(r2) - d.radius;
                return d.amplitude * std::exp(-s * s / (2.0 * d.width * d.width));
            });
        } else if (d.family == "ground-state") {
            if (d.kind == GroundStateKind::R) {
                u = to_grid(shoot_R(g.dim, c.equation.p), g);
            } else {
                // Iterating at omega = mu makes the rescaling trivial, so the
                // profile lands on the run grid itself.
                FlowOptions options;
                options.trial_omega = ground_state_mu(GroundStateKind::W, g.dim, c.equation.gamma);
                options.edge_tolerance = 1e-4;
                const auto gs = flow_ground_state(GroundStateKind::W, g.dim, c.equation.gamma, g, options);
                u = ComplexField(g, gs.field->values);
            }
            u.values *= d.amplitude;
        } else {
            const fs::path path = d.file.is_absolute() ? d.file : c.base_dir / d.file;
            auto snap = read_snapshot(path);
            if (!(snap.field.grid == g)) throw ConfigError("[datum] file: snapshot grid differs from [grid]");
            u = std::move(snap.field);
            u.values *= d.amplitude;
        }
        apply_plane_wave(u, d.momentum);
    }
    if (d.noise > 0.0) u.values *= 1.0 + d.noise * smooth_noise(g, c.seed);
    return u;
}

} // namespace nls
