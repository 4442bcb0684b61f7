#include "nls/run.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nls {

namespace fs = std::filesystem;

namespace {

std::string snapshot_name(std::size_t sample)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%06zu.nlsf", sample);
    return buf;
}

RegimeReport regime_for(const RunConfig& config, const ComplexField& u0, const RunOptions& options,
                        std::vector<std::string>& warnings)
{
    const auto& params = config.equation;
    try {
        const DatumStats stats = datum_stats(u0, params, config.datum.radial);
        ClassifierConstants constants;
        if (options.cache) constants = load_constants(params, *options.cache, options.compute_constants);
        try {
            return classify(params, stats, constants);
        } catch (const MissingConstants&) {
            auto report = classify(params, std::nullopt, constants);
            report.notes.push_back("datum thresholds not evaluated: " + missing_constants_hint(params, constants));
            warnings.push_back(report.notes.back());
            return report;
        }
    } catch (const Error& e) {
        RegimeReport report;
        report.params = params;
        report.notes.push_back(std::string("not classified: ") + e.what());
        warnings.push_back(report.notes.back());
        return report;
    }
}

std::optional<double> convexity_bound(const RegimeReport& regime)
{
    for (const auto& c : regime.blowup)
        if (c.status == CaseStatus::satisfied && c.A) return c.A;
    return std::nullopt;
}

} // namespace

std::string RunRecord::verdict() const
{
    std::ostringstream os;
    os << std::setprecision(6);
    os << "verdict: " << to_string(termination) << " t=" << t_final << " steps=" << steps
       << " mass_drift=" << mass_drift << " energy_drift=" << energy_drift
       << " blowup=" << (blowup.fired ? blowup.reason : "no") << " regime=" << regime.verdict();
    if (scattering) os << " scattering_proxy=" << (scattering->scattering_consistent ? "consistent" : "inconclusive");
    if (!warnings.empty()) os << " warnings=" << warnings.size();
    return os.str();
}

RunRecord run_evolve(const RunConfig& config, const RunOptions& options)
{
    config.validate();
    RunRecord rec;
    rec.config = config;
    const auto& params = config.equation;
    for (const auto& note : params.scope_notes()) rec.warnings.push_back("scope: " + note);

    const ComplexField u0 = make_datum(config);
    rec.regime = regime_for(config, u0, options, rec.warnings);

    const fs::path dir = config.output.directory;
    if (options.write_files) fs::create_directories(dir);
    std::vector<std::string> files;

    ObservableRecorder recorder(params, ZeroMode::whole_space, options.energy);
    std::optional<ScatteringMonitor> scattering;
    if (config.diagnostics.scattering) scattering.emplace(params);
    std::vector<NormSpec> specs;
    for (const auto& label : config.diagnostics.norms) specs.push_back(norm_spec(label, params.n));
    SpacetimeAccumulator spacetime(specs);

    std::size_t sample = 0;
    double grad_max = 0.0;
    std::vector<Observer> observers{recorder.observer()};
    if (scattering) observers.push_back(scattering->observer());
    if (!specs.empty()) observers.push_back(spacetime.observer());
    observers.push_back([&](double t, const ComplexField& u) {
        grad_max = std::max(grad_max, h1_seminorm(u));
        rec.boundary_amplitude = std::max(rec.boundary_amplitude, boundary_amplitude_ratio(u));
        if (options.write_files) {
            if (sample == 0) {
                write_snapshot(dir / "snapshot_initial.nlsf", u, t);
                files.push_back("snapshot_initial.nlsf");
            } else if (config.output.snapshot_every > 0 && sample % config.output.snapshot_every == 0) {
                write_snapshot(dir / snapshot_name(sample), u, t);
                files.push_back(snapshot_name(sample));
            }
        }
        ++sample;
    });

    const Trajectory traj = evolve(u0, params, config.evolution, observers);
    rec.termination = traj.termination;
    rec.t_final = traj.t_final;
    rec.steps = traj.steps;
    rec.series = recorder.series();
    rec.gradient_norm_initial = traj.gradient_norm_initial;
    rec.gradient_norm_max = grad_max;

    const auto& s = rec.series;
    const double m0 = s.M.front();
    const double e0 = s.E.front();
    for (std::size_t i = 0; i < s.size(); ++i) {
        rec.mass_drift = std::max(rec.mass_drift, std::abs(s.M[i] - m0) / m0);
        const double de = std::abs(s.E[i] - e0);
        rec.energy_drift = std::max(rec.energy_drift, e0 != 0.0 ? de / std::abs(e0) : de);
    }
    rec.closure = virial_closure(s);
    rec.blowup = blowup_detector(s, traj, convexity_bound(rec.regime));
    if (scattering) rec.scattering = scattering->report(config.diagnostics.tail_start);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        try {
            rec.spacetime_norms[config.diagnostics.norms[i]] = spacetime.value(i);
        } catch (const InsufficientSamples& e) {
            rec.warnings.push_back(config.diagnostics.norms[i] + " norm: " + e.what());
        }
    }
    if (rec.boundary_amplitude > 1e-8) {
        std::ostringstream os;
        os << std::setprecision(3) << "boundary: max |u| on the box shell reached " << rec.boundary_amplitude
           << " of the peak (above 1e-8); enlarge the box";
        rec.warnings.push_back(os.str());
    }
    if (!rec.closure.boundary_clear)
        rec.warnings.push_back("virial: some samples carry mass near the box faces; the identity is checked only on clear samples");
    if (options.log)
        for (const auto& w : rec.warnings) *options.log << "warning: " << w << '\n';

    if (options.write_files) {
        write_snapshot(dir / "snapshot_final.nlsf", traj.final_state, traj.t_final);
        files.push_back("snapshot_final.nlsf");
        std::ostringstream csv;
        s.write_csv(csv);
        atomic_write(dir / "series.csv", csv.str());
        files.insert(files.begin(), "series.csv");

        nlohmann::json detectors = {{"blowup", to_json(rec.blowup)}, {"virial_closure", to_json(rec.closure)}};
        detectors["scattering"] = rec.scattering ? to_json(*rec.scattering) : nlohmann::json(nullptr);
        detectors["spacetime_norms"] = rec.spacetime_norms;
        atomic_write(dir / "detectors.json", dump_json(detectors));
        files.push_back("detectors.json");
        atomic_write(dir / "regime.json", dump_json(to_json(rec.regime)));
        files.push_back("regime.json");

        for (const auto& f : files) rec.manifest.push_back(manifest_entry(dir, f));
        atomic_write(dir / "record.json", dump_json(to_json(rec)));
    }
    return rec;
}

nlohmann::json to_json(const RunRecord& r)
{
    const auto& s = r.series;
    nlohmann::json final_obs = nullptr;
    if (s.size() > 0) {
        const std::size_t i = s.size() - 1;
        final_obs = {{"t", s.t[i]},
                     {"M", s.M[i]},
                     {"E", s.E[i]},
                     {"kinetic", s.kinetic[i]},
                     {"pot_power", s.pot_power[i]},
                     {"pot_hartree", s.pot_hartree[i]},
                     {"f", s.f[i]},
                     {"fprime", s.fprime[i]},
                     {"fsecond_formula", s.fsecond_formula[i]}};
    }
    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& m : r.manifest) manifest.push_back(to_json(m));
    nlohmann::json detectors = {{"blowup", to_json(r.blowup)}, {"virial_closure", to_json(r.closure)}};
    detectors["scattering"] = r.scattering ? to_json(*r.scattering) : nlohmann::json(nullptr);
    detectors["spacetime_norms"] = r.spacetime_norms;
    return {{"config", to_json(r.config)},
            {"termination", to_string(r.termination)},
            {"t_final", r.t_final},
            {"steps", r.steps},
            {"samples", s.size()},
            {"final_observables", final_obs},
            {"mass_drift", r.mass_drift},
            {"energy_drift", r.energy_drift},
            {"gradient_norm_initial", r.gradient_norm_initial},
            {"gradient_norm_max", r.gradient_norm_max},
            {"boundary_amplitude", r.boundary_amplitude},
            {"detectors", detectors},
            {"regime_verdict", r.regime.verdict()},
            {"warnings", r.warnings},
            {"manifest", manifest},
            {"verdict", r.verdict()}};
}

} // namespace nls
