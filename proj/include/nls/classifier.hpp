#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nls/diagnostics.hpp"
#include "nls/dynamics.hpp"
#include "nls/ground_state.hpp"

namespace nls {

/// Initial-datum statistics entering the case conditions.
struct DatumStats {
    double mass = 0.0;
    double energy = 0.0;
    /// ||grad u0||^2.
    double kinetic = 0.0;
    /// Caller-supplied radial flag; unset means unknown.
    std::optional<bool> radial;
    double variance = 0.0;
    double virial = 0.0;

    /// Throws InvalidParameter unless mass > 0 and all values are finite.
    void validate() const;
};

/// Stats of a field. Energy uses the whole-space zero mode. When radial is
/// not given, a field symmetric under all axis permutations to 1e-8 of its
/// peak is marked radial; otherwise the flag stays unknown.
DatumStats datum_stats(const ComplexField& u, const EquationParams& params,
                       std::optional<bool> radial = std::nullopt);

enum class CaseStatus { satisfied, violated, not_applicable, conditional };

std::string to_string(CaseStatus s);

/// One inequality of a case, lhs relation rhs.
struct Threshold {
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string relation = "<";
    bool holds = false;
};

struct CaseEntry {
    /// "gwp", "scattering" or "blowup".
    std::string family;
    /// "1", "2.1" ... "4" for gwp; "1", "2" for scattering; "1", "2", "3a",
    /// "3b", "3c" for blowup.
    std::string id;
    CaseStatus status = CaseStatus::not_applicable;
    std::vector<Threshold> thresholds;
    std::vector<std::string> notes;
    /// Upper bound of f'' used by the convexity argument.
    std::optional<double> A;
    std::string A_symbolic;
    std::optional<ThetaReport> theta;
};

struct RegimeReport {
    EquationParams params;
    std::optional<DatumStats> stats;
    std::vector<CaseEntry> gwp, scattering, blowup;
    /// False when a gwp case and a blowup case with numeric A are both
    /// satisfied. That combination is contradictory and signals a bug.
    bool exclusive = true;
    /// np/2 < gamma <= 2 + n - 4/p with l1 < 0 < l2: neither the gwp nor the
    /// blowup cases decide this band without datum thresholds.
    bool indeterminate_band = false;
    std::vector<std::string> notes;

    const CaseEntry& find(const std::string& family, const std::string& id) const;
    /// Short verdict: "gwp", "blowup", "gwp-threshold", "blowup-conditional",
    /// "indeterminate" or "none".
    std::string verdict() const;
};

/// Ground-state constants used by threshold cases. R must match (n, p) and
/// W must match (n, gamma).
struct ClassifierConstants {
    std::optional<SharpConstants> R;
    std::optional<SharpConstants> W;
};

/// Parameter ranges accepted by the classifier: n >= 1, 0 < p <= 4/(n-2),
/// 0 < gamma <= 4, finite couplings. Points with gamma >= n or a zero
/// coupling are accepted and every case reports not-applicable. Dimensions
/// n >= 4 are allowed with externally supplied constants.
void validate_classifier_params(const EquationParams& params);

/// Cases 1, 2.1-2.5, 3.1-3.4, 4 in that order. Without stats, threshold
/// cases whose parameter ranges match are reported conditional. With stats,
/// a threshold case whose constants are missing throws MissingConstants.
std::vector<CaseEntry> classify_gwp(const EquationParams& params, const std::optional<DatumStats>& stats,
                                    const ClassifierConstants& constants = {});

/// Cases 1 and 2. Never "satisfied" where a small mass condition or a
/// mass-critical scattering assumption is involved.
std::vector<CaseEntry> classify_scattering(const EquationParams& params, const std::optional<DatumStats>& stats);

/// Cases 1, 2, 3a, 3b, 3c. 3a and 3b involve an unspecified C(M) and are at
/// most conditional.
std::vector<CaseEntry> classify_blowup(const EquationParams& params, const std::optional<DatumStats>& stats);

/// All three families plus the cross-checks.
RegimeReport classify(const EquationParams& params, const std::optional<DatumStats>& stats,
                      const ClassifierConstants& constants = {});

/// Mass threshold of case 2.3: M < ||W||^2 / |l2|.
Threshold mass_threshold_W(double mass, const SharpConstants& W, double lambda2);

/// np/2 < gamma <= 2 + n - 4/p.
bool in_indeterminate_band(int n, double p, double gamma);

/// Lazily computed ground-state constants keyed by (n, exponent). R comes
/// from shooting, W from the flow on the configured grid.
class ConstantsCache {
public:
    /// The default edge tolerance admits the slower tail of W at gamma = 2,
    /// whose mass on a 96^3 grid still agrees with 128^3 to 1e-4.
    explicit ConstantsCache(GridSpec w_grid = make_grid(3, 96, 32.0), FlowOptions w_options = {.edge_tolerance = 1e-4})
        : w_grid_(w_grid), w_options_(w_options)
    {
    }

    const SharpConstants& R(int n, double p);
    const SharpConstants& W(int n, double gamma);
    /// Constants needed for the given parameters; entries that cannot be
    /// computed (n > 3, exponent outside the existence range) stay unset.
    ClassifierConstants for_params(const EquationParams& params);

private:
    GridSpec w_grid_;
    FlowOptions w_options_;
    std::map<std::pair<int, double>, SharpConstants> r_, w_;
};

struct SweepCell {
    double p = 0.0;
    double gamma = 0.0;
    std::optional<RegimeReport> report;
    std::string error;
};

struct SweepOptions {
    std::vector<double> p_values;
    std::vector<double> gamma_values;
    /// Builds the datum for a cell; unset classifies from parameters alone.
    std::function<ComplexField(const EquationParams&)> datum;
    /// Fetch ground-state constants for threshold cases.
    bool with_constants = true;
};

/// Classifies every (p, gamma) cell with the couplings and n of base. Errors
/// are stored per cell and never abort the sweep.
std::vector<SweepCell> sweep(const EquationParams& base, const SweepOptions& options, ConstantsCache& cache);

/// Columns p, gamma, gwp_case, scattering_case, blowup_case, A, notes.
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

/// Case list of a family as it appears in sweep tables: satisfied ids, then
/// conditional ids marked with '?', or "none".
std::string case_summary(const std::vector<CaseEntry>& entries);

} // namespace nls
