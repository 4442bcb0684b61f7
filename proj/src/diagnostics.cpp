#include "nls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace nls {

namespace {

void check_dimension(const ComplexField& u, const EquationParams& params)
{
    if (u.grid.dim != params.n)
        throw ShapeMismatch("field dimension " + std::to_string(u.grid.dim) + " differs from n = "
                            + std::to_string(params.n));
}

} // namespace

double mass(const ComplexField& u)
{
    return lp_integral(u, 2.0);
}

EnergyTerms energy_terms(const ComplexField& u, const EquationParams& params, ZeroMode zm)
{
    check_dimension(u, params);
    EnergyTerms e;
    const double g = h1_seminorm(u);
    e.kinetic = 0.5 * g * g;
    if (params.lambda1 != 0.0)
        e.pot_power = params.lambda1 / (params.p + 2) * lp_integral(u, params.p + 2);
    if (params.lambda2 != 0.0)
        e.pot_hartree = 0.25 * params.lambda2 * hartree_form(u, params.gamma, zm);
    e.total = e.kinetic + e.pot_power + e.pot_hartree;
    return e;
}

double energy(const ComplexField& u, const EquationParams& params, ZeroMode zm)
{
    return energy_terms(u, params, zm).total;
}

double variance(const ComplexField& u)
{
    return (spectral_context(u.grid).radius_squared() * u.values.abs2()).sum() * u.grid.cell_volume();
}

double virial_first(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    Eigen::ArrayXcd hat, tmp, d;
    ctx.forward(u.values, hat);
    const double norm = 1.0 / static_cast<double>(u.grid.size());
    double s = 0.0;
    for (int a = 0; a < u.grid.dim; ++a) {
        tmp = hat * (cplx(0.0, norm) * ctx.k_component(a));
        ctx.backward(tmp, d);
        s += (ctx.coordinate(a) * (u.values.conjugate() * d).imag()).sum();
    }
    return 4.0 * s * u.grid.cell_volume();
}

bool boundary_contaminated(const ComplexField& u)
{
    return boundary_mass_fraction(u) > 1e-6;
}

namespace {

/// f'' rewritten through the energy terms: l1 P = (p+2) pot_power and
/// l2 H = 4 pot_hartree.
double virial_formula_from_terms(const EnergyTerms& e, const EquationParams& params)
{
    return 16.0 * e.total + (4.0 * params.n * params.p - 16.0) * e.pot_power
           + 8.0 * (params.gamma - 2.0) * e.pot_hartree;
}

} // namespace

double virial_second_formula(const ComplexField& u, const EquationParams& params, ZeroMode zm)
{
    return virial_formula_from_terms(energy_terms(u, params, zm), params);
}

double virial_second_formula(const EnergyTerms& terms, const EquationParams& params)
{
    return virial_formula_from_terms(terms, params);
}

ThetaReport theta_bound(double t, double f0, double im_moment, double A)
{
    ThetaReport r;
    const double b = 4.0 * im_moment;
    r.value = f0 + b * t + 0.5 * A * t * t;
    r.attains_negative = 8.0 * im_moment * im_moment > A * f0;
    if (A == 0.0) {
        if (b < 0.0) r.root = -f0 / b;
        return r;
    }
    const double disc = b * b - 2.0 * A * f0;
    if (disc < 0.0) return r;
    // Roots of (A/2) t^2 + b t + f0, computed without cancellation.
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> roots;
    if (q != 0.0) roots.push_back(f0 / q);
    roots.push_back(q / (0.5 * A));
    for (double root : roots)
        if (root > 0.0 && (!r.root || root < *r.root)) r.root = root;
    return r;
}

void ObservableSeries::write_csv(std::ostream& out) const
{
    out << "t,M,E,kinetic,pot_power,pot_hartree,f,fprime,fsecond_formula\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << t[i] << ',' << M[i] << ',' << E[i] << ',' << kinetic[i] << ',' << pot_power[i] << ','
            << pot_hartree[i] << ',' << f[i] << ',' << fprime[i] << ',' << fsecond_formula[i] << '\n';
    }
}

Observer ObservableRecorder::observer()
{
    return [this](double t, const ComplexField& u) { record(t, u); };
}

void ObservableRecorder::record(double t, const ComplexField& u)
{
    if (!series_.t.empty() && !(t > series_.t.back()))
        throw InvalidParameter("observation times must increase strictly");
    const EnergyTerms e = energy_ ? energy_(u, params_, zm_) : energy_terms(u, params_, zm_);
    series_.t.push_back(t);
    series_.M.push_back(mass(u));
    series_.E.push_back(e.total);
    series_.kinetic.push_back(e.kinetic);
    series_.pot_power.push_back(e.pot_power);
    series_.pot_hartree.push_back(e.pot_hartree);
    series_.f.push_back(variance(u));
    series_.fprime.push_back(virial_first(u));
    series_.fsecond_formula.push_back(virial_formula_from_terms(e, params_));
    series_.boundary_flag.push_back(boundary_contaminated(u));
}

VirialClosure virial_closure(const ObservableSeries& s)
{
    VirialClosure c;
    for (bool flag : s.boundary_flag) c.boundary_clear = c.boundary_clear && !flag;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double h1 = s.t[i] - s.t[i - 1];
        const double h2 = s.t[i + 1] - s.t[i];
        const double fd2 = 2.0 * ((s.f[i + 1] - s.f[i]) / h2 - (s.f[i] - s.f[i - 1]) / h1) / (h1 + h2);
        const double formula = s.fsecond_formula[i];
        const double err = std::abs(fd2 - formula) / std::max(std::abs(formula), 1.0);
        c.t.push_back(s.t[i]);
        c.fd2.push_back(fd2);
        c.formula.push_back(formula);
        c.rel_error.push_back(err);
        c.max_rel_error = std::max(c.max_rel_error, err);
        const bool clear = !s.boundary_flag[i - 1] && !s.boundary_flag[i] && !s.boundary_flag[i + 1];
        c.clear.push_back(clear);
        if (clear) {
            c.max_rel_error_clear = std::max(c.max_rel_error_clear, err);
            ++c.clear_count;
        }
    }
    return c;
}

BlowupReport blowup_detector(const ObservableSeries& s, const Trajectory& trajectory, std::optional<double> A)
{
    BlowupReport r;
    if (s.size() == 0) return r;

    if (trajectory.termination != Termination::completed) {
        r.fired = true;
        r.reason = trajectory.termination == Termination::guard_tripped ? "guard_tripped" : "nonfinite";
        r.window_end = trajectory.t_final;
        r.window_start = s.size() >= 2 ? s.t[s.size() - 2] : s.t.front();
    } else {
        const double f0 = s.f.front();
        const double tol = A ? 1e-6 * std::max(std::abs(*A), 1.0) : 0.0;
        bool bounded = true;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (A) bounded = bounded && s.fsecond_formula[i] <= *A + tol;
            if (!bounded) break;
            if (s.f[i] < 0.01 * f0) {
                r.fired = true;
                r.reason = "variance_collapse";
                r.window_start = s.t[i - 1];
                r.window_end = s.t[i];
                break;
            }
        }
    }

    if (A) {
        const auto theta = theta_bound(0.0, s.f.front(), 0.25 * s.fprime.front(), *A);
        r.theta_root = theta.root;
        if (r.fired && theta.root) r.within_theta_bound = r.window_end <= 1.5 * *theta.root;
    }
    return r;
}

Observer ScatteringMonitor::observer()
{
    return [this](double t, const ComplexField& u) { record(t, u); };
}

void ScatteringMonitor::record(double t, const ComplexField& u)
{
    const EnergyTerms e = energy_terms(u, params_, ZeroMode::whole_space);
    sample_t_.push_back(t);
    potential_.push_back(std::abs(e.pot_power) + std::abs(e.pot_hartree));

    ComplexField w = linear_step(u, -t);
    if (last_w_) {
        ComplexField d(w.grid, w.values - last_w_->values);
        const double g = h1_seminorm(d);
        t_.push_back(t);
        cauchy_.push_back(std::sqrt(mass(d) + g * g));
    }
    last_w_ = std::move(w);
}

ScatteringMonitor::Report ScatteringMonitor::report(std::optional<double> tail_start) const
{
    Report r;
    r.t = t_;
    r.cauchy = cauchy_;
    r.potential = potential_;
    r.sample_t = sample_t_;
    if (sample_t_.empty()) return r;

    const double start = tail_start.value_or(0.5 * (sample_t_.front() + sample_t_.back()));
    std::size_t count = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i] < start) continue;
        if (count > 0) monotone = monotone && cauchy_[i] <= cauchy_[i - 1];
        ++count;
    }
    r.monotone_tail = monotone && count >= 2;

    const double peak = *std::max_element(potential_.begin(), potential_.end());
    const double last = potential_.back();
    r.potential_decay = last > 0.0 ? peak / last : (peak > 0.0 ? infinity : 0.0);
    r.scattering_consistent = r.monotone_tail && r.potential_decay >= 10.0;
    return r;
}

NormSpec norm_spec(const std::string& label, int n)
{
    if (n < 1) throw InvalidParameter("dimension must be positive");
    NormSpec s;
    s.label = label;
    if (label == "U") {
        s.q = 6.0;
        s.r = 6.0 * n / (3.0 * n - 2.0);
    } else if (label == "V") {
        s.q = s.r = 2.0 * (n + 2) / n;
    } else if (label == "W") {
        if (n <= 2) throw InvalidParameter("W norm needs n >= 3");
        s.q = s.r = 2.0 * (n + 2) / (n - 2);
    } else if (label == "Z") {
        if (n <= 1) throw InvalidParameter("Z norm needs n >= 2");
        s.q = n + 1.0;
        s.r = 2.0 * (n + 1) / (n - 1);
    } else {
        throw InvalidParameter("unknown norm label '" + label + "'");
    }
    return s;
}

Observer SpacetimeAccumulator::observer()
{
    return [this](double t, const ComplexField& u) { record(t, u); };
}

void SpacetimeAccumulator::record(double t, const ComplexField& u)
{
    if (norms_.empty()) norms_.resize(specs_.size());
    t_.push_back(t);
    for (std::size_t i = 0; i < specs_.size(); ++i) norms_[i].push_back(lp_norm(u, specs_[i].r));
}

double SpacetimeAccumulator::value(std::size_t i) const
{
    if (i >= specs_.size()) throw InvalidParameter("norm spec index out of range");
    if (t_.size() < 10)
        throw InsufficientSamples("space-time norm needs at least 10 samples, have " + std::to_string(t_.size()));
    return spacetime_norm(t_, norms_[i], specs_[i].q);
}

double spacetime_norm(const std::vector<double>& t, const std::vector<double>& space_norm, double q)
{
    if (t.size() != space_norm.size()) throw ShapeMismatch("time and norm samples differ in length");
    if (t.size() < 10)
        throw InsufficientSamples("space-time norm needs at least 10 samples, have " + std::to_string(t.size()));
    if (!(q > 0.0)) throw InvalidParameter("time exponent must be positive");
    double integral = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        integral += 0.5 * (t[i] - t[i - 1]) * (std::pow(space_norm[i], q) + std::pow(space_norm[i - 1], q));
    return std::pow(integral, 1.0 / q);
}

} // namespace nls
