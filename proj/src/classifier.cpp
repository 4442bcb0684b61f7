#include "nls/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace nls {

namespace {

/// Parameter-range comparisons tolerate round-off so that boundary points
/// such as gamma = 2 + n - 4/p evaluate as equalities.
bool eq(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}
bool le(double a, double b) { return a < b || eq(a, b); }
bool lt(double a, double b) { return a < b && !eq(a, b); }

double energy_critical(int n)
{
    return n > 2 ? 4.0 / (n - 2) : std::numeric_limits<double>::infinity();
}

bool excluded_endpoint(const EquationParams& P)
{
    return P.n > 2 && eq(P.p, energy_critical(P.n)) && eq(P.gamma, 4.0);
}

std::string fmt(double x)
{
    std::ostringstream s;
    s << std::setprecision(10) << x;
    return s.str();
}

CaseEntry entry(const std::string& family, const std::string& id)
{
    CaseEntry e;
    e.family = family;
    e.id = id;
    return e;
}

/// Strict comparison of datum quantities, with a note when the two sides
/// agree to one part in 1e6.
Threshold strict_less(const std::string& label, double lhs, double rhs)
{
    Threshold t;
    t.label = label;
    t.lhs = lhs;
    t.rhs = rhs;
    t.holds = lhs < rhs;
    return t;
}

void add_threshold(CaseEntry& e, Threshold t)
{
    if (std::abs(t.lhs - t.rhs) <= 1e-6 * std::max(std::abs(t.rhs), std::numeric_limits<double>::min()))
        e.notes.push_back("near equality in " + t.label + ": " + fmt(t.lhs) + " vs " + fmt(t.rhs));
    e.thresholds.push_back(std::move(t));
}

/// Status from the thresholds and the radial requirement.
void settle(CaseEntry& e, bool radial_required, const std::optional<DatumStats>& stats)
{
    if (!stats) {
        e.status = CaseStatus::conditional;
        e.notes.emplace_back("datum threshold: evaluate with initial-datum statistics");
        if (radial_required) e.notes.emplace_back("radial datum required");
        return;
    }
    bool all = std::all_of(e.thresholds.begin(), e.thresholds.end(), [](const Threshold& t) { return t.holds; });
    e.status = all ? CaseStatus::satisfied : CaseStatus::violated;
    if (radial_required) {
        e.notes.emplace_back("radial datum required");
        if (!stats->radial) {
            if (e.status == CaseStatus::satisfied) e.status = CaseStatus::conditional;
            e.notes.emplace_back("radiality of the datum unknown");
        } else if (!*stats->radial) {
            e.status = CaseStatus::violated;
        }
    }
}

const SharpConstants& require_W(const ClassifierConstants& c, const EquationParams& P)
{
    if (!c.W || c.W->kind != GroundStateKind::W || c.W->n != P.n || !eq(c.W->exponent, P.gamma))
        throw MissingConstants("ground state W for n = " + std::to_string(P.n) + ", gamma = " + fmt(P.gamma)
                               + " is required");
    return *c.W;
}

const SharpConstants& require_R(const ClassifierConstants& c, const EquationParams& P)
{
    if (!c.R || c.R->kind != GroundStateKind::R || c.R->n != P.n || !eq(c.R->exponent, P.p))
        throw MissingConstants("ground state R for n = " + std::to_string(P.n) + ", p = " + fmt(P.p)
                               + " is required");
    return *c.R;
}

/// Every case presupposes gamma < n and two nonzero couplings.
bool in_standing_range(const EquationParams& P)
{
    return lt(P.gamma, P.n) && P.lambda1 != 0.0 && P.lambda2 != 0.0;
}

void standing_notes(const EquationParams& P, std::vector<CaseEntry>& out)
{
    if (!lt(P.gamma, P.n))
        for (auto& e : out) e.notes.emplace_back("gamma >= n: outside the range gamma < n where the cases are stated");
    if (P.lambda1 == 0.0 || P.lambda2 == 0.0)
        for (auto& e : out) e.notes.emplace_back("a coupling is zero: no case applies");
}

bool any_status(const std::vector<CaseEntry>& v, CaseStatus s)
{
    return std::any_of(v.begin(), v.end(), [&](const CaseEntry& e) { return e.status == s; });
}

} // namespace

void DatumStats::validate() const
{
    for (double x : {mass, energy, kinetic, variance, virial})
        if (!std::isfinite(x)) throw InvalidParameter("datum statistics must be finite");
    if (!(mass > 0.0)) throw InvalidParameter("datum mass must be positive");
}

DatumStats datum_stats(const ComplexField& u, const EquationParams& params, std::optional<bool> radial)
{
    DatumStats s;
    s.mass = mass(u);
    s.energy = energy(u, params, ZeroMode::whole_space);
    const double g = h1_seminorm(u);
    s.kinetic = g * g;
    s.variance = variance(u);
    s.virial = virial_first(u);
    s.radial = radial;
    if (!radial && u.grid.dim > 1) {
        const GridSpec& gr = u.grid;
        const std::int64_t N = gr.points;
        const double peak = u.values.abs().maxCoeff();
        double asym = 0.0;
        for (std::int64_t i = 0; i < gr.size(); ++i) {
            auto idx = gr.unflatten(i);
            // Transpositions of neighboring axes generate all permutations.
            for (int a = 0; a + 1 < gr.dim; ++a) {
                auto t = idx;
                std::swap(t[a], t[a + 1]);
                std::int64_t flat = 0;
                for (int b = 0; b < gr.dim; ++b) flat = flat * N + t[b];
                asym = std::max(asym, std::abs(u.values(i) - u.values(flat)));
            }
        }
        if (peak > 0.0 && asym < 1e-8 * peak) s.radial = true;
    }
    return s;
}

std::string to_string(CaseStatus s)
{
    switch (s) {
    case CaseStatus::satisfied: return "satisfied";
    case CaseStatus::violated: return "violated";
    case CaseStatus::not_applicable: return "not-applicable";
    case CaseStatus::conditional: return "conditional";
    }
    return "unknown";
}

void validate_classifier_params(const EquationParams& P)
{
    if (P.n < 1) throw InvalidParameter("dimension must be positive");
    if (!(P.p > 0.0) || !std::isfinite(P.p)) throw InvalidExponent("power exponent p must be positive");
    if (P.n > 2 && !le(P.p, energy_critical(P.n))) throw InvalidExponent("p exceeds the energy-critical 4/(n-2)");
    if (!(P.gamma > 0.0) || !le(P.gamma, 4.0)) throw InvalidExponent("Hartree exponent must satisfy 0 < gamma <= 4");
    if (!std::isfinite(P.lambda1) || !std::isfinite(P.lambda2)) throw InvalidParameter("couplings must be finite");
}

Threshold mass_threshold_W(double mass, const SharpConstants& W, double lambda2)
{
    return strict_less("M < ||W||^2 / |lambda2|", mass, W.mass / std::abs(lambda2));
}

bool in_indeterminate_band(int n, double p, double gamma)
{
    return lt(n * p / 2, gamma) && le(gamma, 2.0 + n - 4.0 / p);
}

std::vector<CaseEntry> classify_gwp(const EquationParams& P, const std::optional<DatumStats>& stats,
                                    const ClassifierConstants& constants)
{
    validate_classifier_params(P);
    if (stats) stats->validate();
    const int n = P.n;
    const double p = P.p, g = P.gamma, np2 = n * p / 2;
    const double pc = energy_critical(n);
    const bool excl = excluded_endpoint(P);
    const bool standing = in_standing_range(P);
    const bool pp = standing && P.lambda1 > 0 && P.lambda2 > 0;
    const bool pm = standing && P.lambda1 > 0 && P.lambda2 < 0;
    const bool mp = standing && P.lambda1 < 0 && P.lambda2 > 0;
    const bool mm = standing && P.lambda1 < 0 && P.lambda2 < 0;
    const double l1 = std::abs(P.lambda1), l2 = std::abs(P.lambda2);
    const double hartree_scaling = 4.0 / (2.0 + n - g);

    std::vector<CaseEntry> out;

    auto c1 = entry("gwp", "1");
    if (pp && lt(g, n)) {
        c1.status = excl ? CaseStatus::not_applicable : CaseStatus::satisfied;
        if (excl) c1.notes.emplace_back("excluded endpoint (p, gamma) = (4/(n-2), 4)");
    }
    out.push_back(c1);

    auto c21 = entry("gwp", "2.1");
    if (pm && lt(g, std::min<double>(n, np2))) c21.status = CaseStatus::satisfied;
    out.push_back(c21);

    auto c22 = entry("gwp", "2.2");
    if (pm && le(np2, g) && lt(g, 2.0)) c22.status = CaseStatus::satisfied;
    out.push_back(c22);

    auto c23 = entry("gwp", "2.3");
    if (pm && le(np2, g) && eq(g, 2.0)) {
        if (stats) add_threshold(c23, mass_threshold_W(stats->mass, require_W(constants, P), P.lambda2));
        settle(c23, false, stats);
    }
    out.push_back(c23);

    auto c24 = entry("gwp", "2.4");
    if (pm && le(np2, g) && eq(g, 4.0) && n > 4) {
        if (excl) {
            c24.notes.emplace_back("excluded endpoint (p, gamma) = (4/(n-2), 4)");
        } else {
            if (stats) {
                const auto& W = require_W(constants, P);
                add_threshold(c24, strict_less("E < E~(W) / |lambda2|", stats->energy, W.E_tilde / l2));
                add_threshold(c24, strict_less("||grad u0||^2 < ||grad W||^2 / |lambda2|", stats->kinetic,
                                               W.kinetic / l2));
            }
            settle(c24, true, stats);
        }
    }
    out.push_back(c24);

    auto c25 = entry("gwp", "2.5");
    if (pm && le(np2, g) && lt(2.0, g) && lt(g, std::min<double>(4.0, n))) {
        if (stats) {
            const auto& W = require_W(constants, P);
            const double e = (4 - g) / (g - 2);
            const double Me = std::pow(stats->mass, e);
            add_threshold(c25, strict_less("E M^((4-gamma)/(gamma-2)) < (1/2 - 1/gamma) [2 gamma E~(W) / (|lambda2| (gamma-2))]^(2/(gamma-2))",
                                           stats->energy * Me,
                                           (0.5 - 1 / g) * std::pow(2 * g * W.E_tilde / (l2 * (g - 2)), 2 / (g - 2))));
            add_threshold(c25, strict_less("||grad u0||^2 M^((4-gamma)/(gamma-2)) < (||grad W||^2 / |lambda2|)^(2/(gamma-2))",
                                           stats->kinetic * Me, std::pow(W.kinetic / l2, 2 / (g - 2))));
        }
        settle(c25, false, stats);
    }
    out.push_back(c25);

    auto c31 = entry("gwp", "3.1");
    if (mp && lt(p, std::max(4.0 / n, hartree_scaling)) && lt(g, n)) c31.status = CaseStatus::satisfied;
    out.push_back(c31);

    auto c32 = entry("gwp", "3.2");
    if (mp && eq(p, 4.0 / n) && le(hartree_scaling, p)) {
        if (stats) {
            const auto& R = require_R(constants, P);
            add_threshold(c32, strict_less("||u0|| < |lambda1|^(-n/4) ||R||", std::sqrt(stats->mass),
                                           std::pow(l1, -n / 4.0) * std::sqrt(R.mass)));
        }
        settle(c32, false, stats);
    }
    out.push_back(c32);

    auto c33 = entry("gwp", "3.3");
    if (mp && n > 2 && le(hartree_scaling, p) && eq(p, pc)) {
        if (excl) {
            c33.notes.emplace_back("excluded endpoint (p, gamma) = (4/(n-2), 4)");
        } else if (n >= 5) {
            if (stats) {
                const auto& R = require_R(constants, P);
                const double s = std::pow(l1, (2.0 - n) / 2);
                add_threshold(c33, strict_less("E < |lambda1|^((2-n)/2) E~(R)", stats->energy, s * R.E_tilde));
                add_threshold(c33, strict_less("||grad u0||^2 < |lambda1|^((2-n)/2) ||grad R||^2", stats->kinetic,
                                               s * R.kinetic));
            }
            settle(c33, false, stats);
        } else {
            settle(c33, true, stats);
            // For n = 3, 4 the case states no energy bound. Negative energy
            // would contradict blow-up case 2, and the energies covered by the
            // well-posedness cases are nonnegative, so E < 0 is excluded.
            if (stats && stats->energy < 0) {
                add_threshold(c33, strict_less("E >= 0 (no energy bound stated for n = 3, 4)", -stats->energy, 0.0));
                c33.status = CaseStatus::violated;
            }
        }
    }
    out.push_back(c33);

    auto c34 = entry("gwp", "3.4");
    if (mp && lt(4.0 / n, p) && lt(p, pc) && le(hartree_scaling, p)) {
        if (stats) {
            const auto& R = require_R(constants, P);
            const double e = (4 - (n - 2) * p) / (n * p - 4);
            const double Me = std::pow(stats->mass, e);
            const double lf = std::pow(l1, 4 / (4 - n * p));
            add_threshold(c34, strict_less("E M^((4-(n-2)p)/(np-4)) < |lambda1|^(4/(4-np)) (2np/(np-4))^((4-(n-2)p)/(np-4)) E~(R)^(2p/(np-4))",
                                           stats->energy * Me,
                                           lf * std::pow(2 * n * p / (n * p - 4), e) * std::pow(R.E_tilde, 2 * p / (n * p - 4))));
            add_threshold(c34, strict_less("||grad u0||^2 M^((4-(n-2)p)/(np-4)) < |lambda1|^(4/(4-np)) ||grad R||^(4p/(np-4))",
                                           stats->kinetic * Me, lf * std::pow(R.kinetic, 2 * p / (n * p - 4))));
        }
        settle(c34, false, stats);
    }
    out.push_back(c34);

    auto c4 = entry("gwp", "4");
    if (mm && lt(p, 4.0 / n) && lt(g, 2.0)) c4.status = CaseStatus::satisfied;
    out.push_back(c4);

    standing_notes(P, out);
    return out;
}

std::vector<CaseEntry> classify_scattering(const EquationParams& P, const std::optional<DatumStats>& stats)
{
    validate_classifier_params(P);
    if (stats) stats->validate();
    const int n = P.n;
    const double p = P.p, g = P.gamma;
    const bool ranges = in_standing_range(P) && le(4.0 / n, p) && le(p, energy_critical(n)) && le(2.0, g) && le(g, 4.0) && lt(g, n)
                        && !excluded_endpoint(P);
    const bool mass_critical_p = eq(p, 4.0 / n);
    const bool mass_critical_g = eq(g, 2.0);

    auto assumption_notes = [&](CaseEntry& e) {
        if (mass_critical_p) e.notes.emplace_back("requires the scattering assumption for the mass-critical power equation (p = 4/n)");
        if (mass_critical_g) e.notes.emplace_back("requires the scattering assumption for the mass-critical Hartree equation (gamma = 2)");
    };

    auto c1 = entry("scattering", "1");
    if (P.lambda1 > 0 && P.lambda2 > 0 && ranges) {
        assumption_notes(c1);
        if (mass_critical_p && mass_critical_g) c1.notes.emplace_back("small mass condition (not quantified)");
        c1.status = (mass_critical_p || mass_critical_g) ? CaseStatus::conditional : CaseStatus::satisfied;
    }
    auto c2 = entry("scattering", "2");
    if (P.lambda1 * P.lambda2 < 0 && ranges) {
        assumption_notes(c2);
        c2.notes.emplace_back("small mass condition (not quantified)");
        c2.status = CaseStatus::conditional;
    }
    std::vector<CaseEntry> out{c1, c2};
    standing_notes(P, out);
    return out;
}

std::vector<CaseEntry> classify_blowup(const EquationParams& P, const std::optional<DatumStats>& stats)
{
    validate_classifier_params(P);
    if (stats) stats->validate();
    const int n = P.n;
    const double p = P.p, g = P.gamma, np = n * p;
    const double pc = energy_critical(n);
    const bool standing = in_standing_range(P);

    auto negative_energy = [&](CaseEntry& e, double coefficient, const std::string& symbolic) {
        e.A_symbolic = symbolic;
        if (!stats) {
            e.status = CaseStatus::conditional;
            e.notes.emplace_back("requires E < 0 and finite variance");
            return;
        }
        add_threshold(e, strict_less("E < 0", stats->energy, 0.0));
        e.status = stats->energy < 0 ? CaseStatus::satisfied : CaseStatus::violated;
        if (e.status == CaseStatus::satisfied) {
            e.A = coefficient * stats->energy;
            e.theta = theta_bound(0.0, stats->variance, 0.25 * stats->virial, *e.A);
        }
    };
    auto unspecified = [&](CaseEntry& e, const std::string& inequality, const std::string& symbolic) {
        e.status = CaseStatus::conditional;
        e.A_symbolic = symbolic;
        e.notes.emplace_back("C(M) unspecified: requires " + inequality);
    };

    auto b1 = entry("blowup", "1");
    if (standing && P.lambda1 > 0 && P.lambda2 < 0 && le(2.0, g) && le(g, 4.0) && le(p, pc) && le(np / 2, g))
        negative_energy(b1, 8 * g, "8 gamma E");

    auto b2 = entry("blowup", "2");
    if (standing && P.lambda1 < 0 && P.lambda2 > 0 && le(4.0 / n, p) && le(p, pc) && le(g, np / 2))
        negative_energy(b2, 4 * np, "4 n p E");

    const bool mm = standing && P.lambda1 < 0 && P.lambda2 < 0;
    auto b3a = entry("blowup", "3a");
    if (mm && lt(4.0 / n, p) && le(p, pc) && lt(g, 2.0)) unspecified(b3a, "4npE + C(M) < 0", "4 n p E + C(M)");
    auto b3b = entry("blowup", "3b");
    if (mm && lt(p, 4.0 / n) && lt(2.0, g) && le(g, 4.0)) unspecified(b3b, "8 gamma E + C(M) < 0", "8 gamma E + C(M)");
    auto b3c = entry("blowup", "3c");
    if (mm && le(4.0 / n, p) && le(p, pc) && le(2.0, g) && le(g, 4.0)) {
        // f'' <= 4npE needs gamma >= np/2; otherwise f'' <= 8 gamma E.
        if (le(np / 2, g))
            negative_energy(b3c, 4 * np, "4 n p E");
        else
            negative_energy(b3c, 8 * g, "8 gamma E");
    }
    std::vector<CaseEntry> out{b1, b2, b3a, b3b, b3c};
    standing_notes(P, out);
    return out;
}

RegimeReport classify(const EquationParams& params, const std::optional<DatumStats>& stats,
                      const ClassifierConstants& constants)
{
    RegimeReport r;
    r.params = params;
    r.stats = stats;
    r.gwp = classify_gwp(params, stats, constants);
    r.scattering = classify_scattering(params, stats);
    r.blowup = classify_blowup(params, stats);

    // Scattering presupposes a global solution.
    const bool gwp_sat = any_status(r.gwp, CaseStatus::satisfied);
    const bool gwp_cond = any_status(r.gwp, CaseStatus::conditional);
    for (auto& e : r.scattering) {
        if (e.status == CaseStatus::not_applicable) continue;
        if (!gwp_sat && !gwp_cond) {
            e.status = CaseStatus::violated;
            e.notes.emplace_back("no global well-posedness case holds");
        } else if (!gwp_sat && e.status == CaseStatus::satisfied) {
            e.status = CaseStatus::conditional;
            e.notes.emplace_back("global well-posedness is conditional");
        }
    }

    const bool blowup_numeric = std::any_of(r.blowup.begin(), r.blowup.end(), [](const CaseEntry& e) {
        return e.status == CaseStatus::satisfied && e.A.has_value();
    });
    if (gwp_sat && blowup_numeric) {
        r.exclusive = false;
        r.notes.emplace_back("inconsistent: global well-posedness and blow-up cases both satisfied");
    }
    if (params.lambda1 < 0 && params.lambda2 > 0 && in_indeterminate_band(params.n, params.p, params.gamma)) {
        r.indeterminate_band = true;
        r.notes.emplace_back("indeterminate: np/2 < gamma <= 2 + n - 4/p is not decided by the blow-up cases");
    }
    for (auto& note : params.scope_notes()) r.notes.push_back(note);
    return r;
}

const CaseEntry& RegimeReport::find(const std::string& family, const std::string& id) const
{
    const auto& list = family == "gwp" ? gwp : family == "scattering" ? scattering : blowup;
    for (const auto& e : list)
        if (e.id == id) return e;
    throw InvalidParameter("no case " + family + " " + id);
}

std::string RegimeReport::verdict() const
{
    if (any_status(blowup, CaseStatus::satisfied)) return "blowup";
    if (any_status(gwp, CaseStatus::satisfied)) return "gwp";
    if (indeterminate_band) return "indeterminate";
    std::vector<std::string> parts;
    if (any_status(gwp, CaseStatus::conditional)) parts.emplace_back("gwp-threshold");
    if (any_status(blowup, CaseStatus::conditional)) parts.emplace_back("blowup-conditional");
    if (parts.empty()) return "none";
    std::string v = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) v += "/" + parts[i];
    return v;
}

const SharpConstants& ConstantsCache::R(int n, double p)
{
    const auto key = std::make_pair(n, p);
    auto it = r_.find(key);
    if (it == r_.end()) it = r_.emplace(key, sharp_constants(shoot_R(n, p))).first;
    return it->second;
}

const SharpConstants& ConstantsCache::W(int n, double gamma)
{
    const auto key = std::make_pair(n, gamma);
    auto it = w_.find(key);
    if (it == w_.end()) {
        if (n != w_grid_.dim)
            throw MissingConstants("W for n = " + std::to_string(n) + " needs a grid of that dimension");
        it = w_.emplace(key, sharp_constants(flow_ground_state(GroundStateKind::W, n, gamma, w_grid_, w_options_))).first;
    }
    return it->second;
}

ClassifierConstants ConstantsCache::for_params(const EquationParams& params)
{
    ClassifierConstants c;
    if (params.n > 3) return c;
    const auto probe = classify_gwp(params, std::nullopt);
    auto conditional = [&](const std::string& id) {
        return std::any_of(probe.begin(), probe.end(), [&](const CaseEntry& e) {
            return e.id == id && e.status == CaseStatus::conditional;
        });
    };
    if (conditional("2.3") || conditional("2.5")) c.W = W(params.n, params.gamma);
    if (conditional("3.2") || conditional("3.4")) c.R = R(params.n, params.p);
    return c;
}

std::vector<SweepCell> sweep(const EquationParams& base, const SweepOptions& options, ConstantsCache& cache)
{
    std::vector<SweepCell> cells;
    for (double p : options.p_values) {
        for (double g : options.gamma_values) {
            SweepCell cell;
            cell.p = p;
            cell.gamma = g;
            try {
                EquationParams P = base;
                P.p = p;
                P.gamma = g;
                validate_classifier_params(P);
                std::optional<DatumStats> stats;
                if (options.datum) stats = datum_stats(options.datum(P), P);
                const ClassifierConstants constants =
                    (stats && options.with_constants) ? cache.for_params(P) : ClassifierConstants{};
                cell.report = classify(P, stats, constants);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::string case_summary(const std::vector<CaseEntry>& entries)
{
    std::string out;
    auto add = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };
    for (const auto& e : entries)
        if (e.status == CaseStatus::satisfied) add(e.id);
    for (const auto& e : entries)
        if (e.status == CaseStatus::conditional) add(e.id + "?");
    return out.empty() ? "none" : out;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells)
{
    out << "p,gamma,gwp_case,scattering_case,blowup_case,A,notes\n";
    out << std::setprecision(17);
    for (const auto& c : cells) {
        out << c.p << ',' << c.gamma << ',';
        if (!c.report) {
            out << "error,error,error,," << csv_field("error: " + c.error) << '\n';
            continue;
        }
        const auto& r = *c.report;
        std::string A;
        for (const auto& e : r.blowup) {
            if (e.status == CaseStatus::satisfied && e.A) {
                std::ostringstream s;
                s << std::setprecision(17) << *e.A;
                A = s.str();
                break;
            }
            if (e.status == CaseStatus::conditional && A.empty()) A = e.A_symbolic;
        }
        std::string notes;
        for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
        out << csv_field(case_summary(r.gwp)) << ',' << csv_field(case_summary(r.scattering)) << ','
            << csv_field(case_summary(r.blowup)) << ',' << csv_field(A) << ',' << csv_field(notes) << '\n';
    }
}

} // namespace nls
