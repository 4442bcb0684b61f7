#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nls/dynamics.hpp"
#include "nls/grid.hpp"
#include "nls/spectral.hpp"

namespace nls {

/// M(u) = ||u||_2^2.
double mass(const ComplexField& u);

struct EnergyTerms {
    double kinetic = 0.0;     ///< (1/2) ||grad u||^2
    double pot_power = 0.0;   ///< (l1 / (p+2)) ||u||_{p+2}^{p+2}
    double pot_hartree = 0.0; ///< (l2 / 4) int (K * |u|^2) |u|^2
    double total = 0.0;
};

/// Energy and its three terms. With ZeroMode::drop the Hartree term misses
/// the constant K^(0) M^2 / V; both conventions are conserved.
EnergyTerms energy_terms(const ComplexField& u, const EquationParams& params,
                         ZeroMode zm = ZeroMode::drop);
double energy(const ComplexField& u, const EquationParams& params, ZeroMode zm = ZeroMode::drop);

/// f = int |x|^2 |u|^2 with box-centered x.
double variance(const ComplexField& u);

/// f' = 4 Im int conj(u) x . grad u, spectral gradient.
double virial_first(const ComplexField& u);

/// True when the outer two layers of the box carry more than 1e-6 of the
/// mass. x-weighted integrals are then unreliable because x jumps across
/// the periodic seam.
bool boundary_contaminated(const ComplexField& u);

/// f'' = 16E + ((4np - 16)/(p+2)) l1 ||u||_{p+2}^{p+2} + 2 l2 (gamma - 2) int (K * |u|^2)|u|^2.
/// Defaults to the whole-space zero mode so that the right-hand side is the
/// one of the unbounded problem.
double virial_second_formula(const ComplexField& u, const EquationParams& params,
                             ZeroMode zm = ZeroMode::whole_space);

/// The same right-hand side from precomputed energy terms.
double virial_second_formula(const EnergyTerms& terms, const EquationParams& params);

/// theta(t) = f0 + 4 t I + A t^2 / 2 with I = Im int conj(phi) x . grad phi.
struct ThetaReport {
    double value = 0.0;
    /// 8 I^2 > A f0, the condition for theta to take negative values.
    bool attains_negative = false;
    /// Smallest positive root, an upper bound for the blow-up time.
    std::optional<double> root;
};

ThetaReport theta_bound(double t, double f0, double im_moment, double A);

/// Diagnostics sampled along a trajectory.
struct ObservableSeries {
    std::vector<double> t, M, E, kinetic, pot_power, pot_hartree, f, fprime, fsecond_formula;
    std::vector<bool> boundary_flag;

    std::size_t size() const { return t.size(); }
    /// CSV with header t,M,E,kinetic,pot_power,pot_hartree,f,fprime,fsecond_formula
    /// and 17 significant digits.
    void write_csv(std::ostream& out) const;
};

/// Appends one row per observer call. The recorder must outlive the
/// evolution that uses its observer.
/// Energy functional used by the recorder; the default is energy_terms
/// with the recorder's zero mode. Replaceable so that verification suites
/// can check that a perturbed functional is detected.
using EnergyFunction = std::function<EnergyTerms(const ComplexField&, const EquationParams&, ZeroMode)>;

class ObservableRecorder {
public:
    explicit ObservableRecorder(EquationParams params, ZeroMode zm = ZeroMode::whole_space,
                                EnergyFunction energy = {})
        : params_(params), zm_(zm), energy_(std::move(energy))
    {
    }

    Observer observer();
    void record(double t, const ComplexField& u);
    const ObservableSeries& series() const { return series_; }

private:
    EquationParams params_;
    ZeroMode zm_;
    EnergyFunction energy_;
    ObservableSeries series_;
};

/// Centered second difference of f at interior samples (uniform spacing
/// assumed), paired with the formula value at the same sample.
struct VirialClosure {
    std::vector<double> t, fd2, formula, rel_error;
    /// Per interior sample: the sample and both neighbours are free of mass
    /// near the box faces.
    std::vector<bool> clear;
    /// Maximum over all interior samples.
    double max_rel_error = 0.0;
    /// Maximum over clear samples only; the periodic box breaks the identity
    /// once mass reaches the faces.
    double max_rel_error_clear = 0.0;
    std::size_t clear_count = 0;
    bool boundary_clear = true;
};

/// Relative error |fd2 - formula| / max(|formula|, 1).
VirialClosure virial_closure(const ObservableSeries& s);

struct BlowupReport {
    bool fired = false;
    /// "guard_tripped", "nonfinite", "variance_collapse" or "none".
    std::string reason = "none";
    /// Last sample before detection and the detection time.
    double window_start = 0.0;
    double window_end = 0.0;
    std::optional<double> theta_root;
    /// window_end <= 1.5 * theta_root.
    std::optional<bool> within_theta_bound;
};

/// Fires when the evolution stopped early (guard or non-finite values), or
/// when f dropped below 1% of f(0) while the formula f'' stayed at or below
/// A (+1e-6 max(|A|, 1)). Without A only the collapse of f is required.
BlowupReport blowup_detector(const ObservableSeries& s, const Trajectory& trajectory,
                             std::optional<double> A = std::nullopt);

/// Tracks w(t) = e^{-it Lap} u(t) along a run without storing snapshots.
/// Reports are heuristic proxies for scattering, not proofs.
class ScatteringMonitor {
public:
    explicit ScatteringMonitor(EquationParams params) : params_(params) {}

    Observer observer();
    void record(double t, const ComplexField& u);

    struct Report {
        std::vector<double> t;
        /// ||w(t_i) - w(t_{i-1})||_{H^1}, paired with t_i.
        std::vector<double> cauchy;
        /// |pot_power| + |pot_hartree| at every sample (t[0] included).
        std::vector<double> potential;
        std::vector<double> sample_t;
        bool monotone_tail = false;
        double potential_decay = 0.0;
        bool scattering_consistent = false;
        std::string label = "proxy: monotone Cauchy tail and >= 10x potential decay";
    };

    /// Monotonicity is checked over t >= tail_start (default: second half).
    Report report(std::optional<double> tail_start = std::nullopt) const;

private:
    EquationParams params_;
    std::optional<ComplexField> last_w_;
    std::vector<double> t_, cauchy_, potential_, sample_t_;
};

struct NormSpec {
    double q = 2.0;
    double r = 2.0;
    std::string label = "custom";
};

/// U = (6, 6n/(3n-2)), V = (2(n+2)/n, 2(n+2)/n), W = (2(n+2)/(n-2), same),
/// Z = (n+1, 2(n+1)/(n-1)). Throws InvalidParameter for unknown labels or
/// when the exponent is undefined for n.
NormSpec norm_spec(const std::string& label, int n);

/// Records ||u(t)||_{L^r} per spec for space-time norms.
class SpacetimeAccumulator {
public:
    explicit SpacetimeAccumulator(std::vector<NormSpec> specs) : specs_(std::move(specs)) {}

    Observer observer();
    void record(double t, const ComplexField& u);

    /// Trapezoid estimate of (int ||u||_r^q dt)^(1/q) for spec i. Throws
    /// InsufficientSamples below 10 samples.
    double value(std::size_t i) const;
    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& space_norms(std::size_t i) const { return norms_.at(i); }

private:
    std::vector<NormSpec> specs_;
    std::vector<double> t_;
    std::vector<std::vector<double>> norms_;
};

/// (int ||u||_r^q dt)^(1/q) from samples of ||u(t)||_r, trapezoid rule.
double spacetime_norm(const std::vector<double>& t, const std::vector<double>& space_norm, double q);

} // namespace nls
