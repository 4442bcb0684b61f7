#include "nls/ground_state.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nls/dynamics.hpp"
#include "nls/spectral.hpp"

namespace nls {

namespace odeint = boost::numeric::odeint;

std::string to_string(GroundStateKind kind)
{
    return kind == GroundStateKind::R ? "R" : "W";
}

namespace {

void check_exponent(GroundStateKind kind, int n, double exponent)
{
    if (n < 1 || n > 3) throw InvalidParameter("ground states are computed for n = 1, 2, 3");
    if (kind == GroundStateKind::R) {
        if (!(exponent > 0.0)) throw InvalidExponent("R needs p > 0");
        if (n >= 3 && exponent >= 4.0 / (n - 2))
            throw InvalidExponent("R needs p < 4/(n-2); the energy-critical endpoint has no L^2 ground state");
    } else {
        if (!(exponent > 0.0) || exponent >= n || exponent >= 4.0)
            throw InvalidExponent("W needs 0 < gamma < min(n, 4)");
    }
}

/// Area of the unit sphere S^{n-1}; 2 for n = 1 (the two half-lines).
double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Composite Simpson on uniform samples; the last interval falls back to the
/// trapezoid rule when the sample count is even.
double simpson(const std::vector<double>& f, double dx)
{
    const std::size_t m = f.size();
    if (m < 2) return 0.0;
    const std::size_t odd_end = (m % 2 == 1) ? m : m - 1;
    double s = f[0] + f[odd_end - 1];
    for (std::size_t i = 1; i + 1 < odd_end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    s *= dx / 3.0;
    if (odd_end != m) s += 0.5 * dx * (f[m - 2] + f[m - 1]);
    return s;
}

using State = std::array<double, 2>;

enum class Shot { overshoot, undershoot, undecided };

struct RadialOde {
    int n;
    double p;
    double mu;
    void operator()(const State& x, State& dxdt, double r) const
    {
        dxdt[0] = x[1];
        dxdt[1] = -(n - 1) / r * x[1] + mu * x[0] - std::pow(std::abs(x[0]), p) * x[0];
    }
};

/// Integrates from a Taylor start at r0. When samples is given, records
/// (R, R') at r = i dr while R stays above stop_level.
Shot shoot_once(const RadialOde& ode, double a, double r_max, std::vector<State>* samples = nullptr,
                double dr = 0.0, double stop_level = 0.0)
{
    const double r0 = 1e-4 / std::sqrt(ode.mu);
    const double c2 = (ode.mu * a - std::pow(a, ode.p + 1)) / (2.0 * ode.n);
    State x{a + c2 * r0 * r0, 2.0 * c2 * r0};
    auto stepper = odeint::make_dense_output(1e-14 * a, 1e-13, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(x, r0, 1e-3 * r0);
    std::size_t next = 1;
    if (samples) samples->push_back(State{a, 0.0});
    while (stepper.current_time() < r_max) {
        const auto [t0, t1] = stepper.do_step(std::cref(ode));
        (void)t0;
        if (samples) {
            while (next * dr <= t1) {
                State s;
                stepper.calc_state(next * dr, s);
                if (s[0] <= stop_level) return Shot::undecided;
                samples->push_back(s);
                ++next;
            }
        }
        const State& cur = stepper.current_state();
        if (cur[0] < 0.0) return Shot::overshoot;
        if (cur[1] > 0.0) return Shot::undershoot;
    }
    return Shot::undecided;
}

} // namespace

double ground_state_mu(GroundStateKind kind, int n, double exponent)
{
    if (kind == GroundStateKind::R) return (4.0 - (n - 2) * exponent) / (n * exponent);
    return (4.0 - exponent) / exponent;
}

double RadialProfile::operator()(double radius) const
{
    if (r.size() < 2) return 0.0;
    radius = std::abs(radius);
    const double dr = r[1] - r[0];
    const std::size_t i = static_cast<std::size_t>(radius / dr);
    if (i + 1 >= r.size()) return 0.0;
    const double t = (radius - r[i]) / dr;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * value[i] + h10 * dr * slope[i] + h01 * value[i + 1] + h11 * dr * slope[i + 1];
}

GroundState shoot_R(int n, double p, double tol)
{
    check_exponent(GroundStateKind::R, n, p);
    if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    const double mu = ground_state_mu(GroundStateKind::R, n, p);
    const double kappa = std::sqrt(mu);
    const RadialOde ode{n, p, mu};
    const double r_max = 50.0 / kappa;

    // Geometric scan for an undershoot/overshoot pair.
    double lo = 0.0, hi = 0.0;
    Shot prev = Shot::undecided;
    double prev_a = 0.0;
    for (double a = 0.01; a <= 1e4 * 1.0000001; a *= 1.2) {
        const Shot s = shoot_once(ode, a, r_max);
        if (prev == Shot::undershoot && s == Shot::overshoot) {
            lo = prev_a;
            hi = a;
            break;
        }
        prev = s;
        prev_a = a;
    }
    if (hi == 0.0) throw NoConvergence("no shooting bracket for R(0) in [0.01, 1e4]");

    long iterations = 0;
    while (hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Shot s = shoot_once(ode, mid, r_max);
        if (s == Shot::overshoot)
            hi = mid;
        else
            lo = mid;
        ++iterations;
    }

    // Sample the accepted trajectory down to 1e-4 R(0), then glue the decaying
    // solution of the linearized equation, r^-nu K_nu(kappa r), nu = n/2 - 1.
    // Step resolves both the decay length and the core curvature scale a^(-p/2).
    const double a = lo;
    // The linearized tail neglects R^p relative to mu; for small p the
    // trajectory is followed until R^p is below 1e-8, but not
    // below 1e-7 R(0), where the growing mode of the bisected shot takes over.
    const double tail_fraction = std::clamp(std::pow(1e-8, 1.0 / p) / a, 1e-7, 1e-4);
    const double dr = 0.004 * std::min(1.0 / kappa, std::pow(a, -0.5 * p));
    std::vector<State> samples;
    const Shot s = shoot_once(ode, a, r_max, &samples, dr, tail_fraction * a);
    if (s != Shot::undecided || samples.size() < 10)
        throw NoConvergence("shooting trajectory left the ground-state branch before decaying");

    const double nu = 0.5 * n - 1.0;
    auto tail = [&](double r) { return std::pow(r, -nu) * boost::math::cyl_bessel_k(nu, kappa * r); };
    auto tail_slope = [&](double r) { return -kappa * std::pow(r, -nu) * boost::math::cyl_bessel_k(nu + 1, kappa * r); };
    const double r_c = (samples.size() - 1) * dr;
    const double C = samples.back()[0] / tail(r_c);

    GroundState gs;
    gs.kind = GroundStateKind::R;
    gs.n = n;
    gs.exponent = p;
    gs.mu = mu;
    gs.iterations = iterations;
    gs.method = "shooting";
    const std::size_t total = static_cast<std::size_t>(std::ceil(50.0 / kappa / dr)) + 1;
    for (std::size_t i = 0; i < total; ++i) {
        const double r = i * dr;
        gs.profile.r.push_back(r);
        if (i < samples.size()) {
            gs.profile.value.push_back(samples[i][0]);
            gs.profile.slope.push_back(samples[i][1]);
        } else {
            gs.profile.value.push_back(C * tail(r));
            gs.profile.slope.push_back(C * tail_slope(r));
        }
    }

    const auto& rr = gs.profile.r;
    const auto& R = gs.profile.value;
    const auto& dR = gs.profile.slope;
    std::vector<double> fm(total), fk(total), fp(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double w = std::pow(rr[i], n - 1);
        fm[i] = R[i] * R[i] * w;
        fk[i] = dR[i] * dR[i] * w;
        fp[i] = std::pow(R[i], p + 2) * w;
    }
    const double area = sphere_area(n);
    gs.mass = area * simpson(fm, dr);
    gs.kinetic = area * simpson(fk, dr);
    gs.potential = area * simpson(fp, dr);

    // Fourth-order finite differences of the stored values.
    double res2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 2; i + 2 < total; ++i) {
        const double d1 = (-R[i + 2] + 8 * R[i + 1] - 8 * R[i - 1] + R[i - 2]) / (12 * dr);
        const double d2 = (-R[i + 2] + 16 * R[i + 1] - 30 * R[i] + 16 * R[i - 1] - R[i - 2]) / (12 * dr * dr);
        const double res = d2 + (n - 1) / rr[i] * d1 - mu * R[i] + std::pow(R[i], p + 1);
        const double w = std::pow(rr[i], n - 1);
        res2 += res * res * w;
        ref2 += mu * mu * R[i] * R[i] * w;
    }
    gs.residual = std::sqrt(res2 / ref2);
    if (!(gs.residual <= tol))
        throw NoConvergence("shooting residual " + std::to_string(gs.residual) + " exceeds tolerance");
    return gs;
}

namespace {

double nonlinear_term(const ComplexField& phi, GroundStateKind kind, double exponent)
{
    if (kind == GroundStateKind::R) return lp_integral(phi, exponent + 2.0);
    return hartree_form(phi, exponent, ZeroMode::whole_space);
}

double edge_peak_ratio(const ComplexField& phi)
{
    const GridSpec& g = phi.grid;
    double edge = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unflatten(i);
        bool on_edge = false;
        for (int a = 0; a < g.dim; ++a) on_edge = on_edge || idx[a] == 0 || idx[a] == g.points - 1;
        if (on_edge) edge = std::max(edge, std::abs(phi.values(i)));
    }
    return edge / phi.values.abs().maxCoeff();
}

} // namespace

GroundState flow_ground_state(GroundStateKind kind, int n, double exponent, const GridSpec& grid,
                              const FlowOptions& options)
{
    check_exponent(kind, n, exponent);
    if (grid.dim != n) throw ShapeMismatch("grid dimension differs from n");
    if (!(options.tol > 0.0) || options.max_steps < 1) throw InvalidParameter("invalid flow options");

    const double mu = ground_state_mu(kind, n, exponent);
    const double omega = options.trial_omega > 0.0
                           ? options.trial_omega
                           : std::pow(std::min(30.0, 0.23 * grid.points) / grid.length, 2);
    EquationParams params;
    params.n = n;
    params.p = kind == GroundStateKind::R ? exponent : 2.0;
    params.gamma = kind == GroundStateKind::W ? exponent : 1.0;
    const FlowMode mode = kind == GroundStateKind::R ? FlowMode::power_only : FlowMode::hartree_only;
    // The Nehari scaling phi -> c phi multiplies the nonlinear term by c^q.
    const double q = kind == GroundStateKind::R ? exponent : 2.0;

    auto nehari = [&](ComplexField& phi) {
        const double g2 = std::pow(h1_seminorm(phi), 2);
        const double m = lp_integral(phi, 2.0);
        const double nl = nonlinear_term(phi, kind, exponent);
        phi.values *= std::pow((g2 + omega * m) / nl, 1.0 / q);
    };

    ComplexField phi = sample(grid, [&](const std::array<double, 3>& x) {
        return std::exp(-0.5 * omega * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    });
    nehari(phi);

    long steps = 0;
    double change = std::numeric_limits<double>::infinity();
    while (steps < options.max_steps) {
        ComplexField next = gradient_flow_step(phi, options.dtau, params, omega, mode);
        next.values = next.values.real().cast<cplx>();
        nehari(next);
        change = std::sqrt((next.values - phi.values).abs2().sum() / next.values.abs2().sum());
        phi = std::move(next);
        ++steps;
        if (change < options.tol) break;
    }
    if (!(change < options.tol))
        throw NoConvergence("ground-state flow did not reach tolerance in " + std::to_string(steps) + " steps");
    const double edge = edge_peak_ratio(phi);
    if (edge > options.edge_tolerance)
        throw BoundaryContamination("ground state decays only to " + std::to_string(edge)
                                    + " of its peak at the box edge");

    // Euler-Lagrange residual at omega.
    const ComplexField nl = flow_nonlinearity(phi, params, mode);
    const Eigen::ArrayXcd el = apply_laplacian(phi).values - omega * phi.values + nl.values;
    const double residual = std::sqrt(el.abs2().sum() / (omega * omega * phi.values.abs2().sum()));

    const double m_phi = lp_integral(phi, 2.0);
    const double k_phi = std::pow(h1_seminorm(phi), 2);
    const double n_phi = nonlinear_term(phi, kind, exponent);

    const double b = std::sqrt(mu / omega);
    const double a = kind == GroundStateKind::R ? std::pow(b, 2.0 / exponent)
                                                : std::pow(b, 0.5 * (2.0 + n - exponent));

    GroundState gs;
    gs.kind = kind;
    gs.n = n;
    gs.exponent = exponent;
    gs.mu = mu;
    gs.iterations = steps;
    gs.method = "flow";
    gs.residual = residual;
    gs.edge_ratio = edge;
    gs.mass = a * a * std::pow(b, -n) * m_phi;
    gs.kinetic = a * a * std::pow(b, 2.0 - n) * k_phi;
    gs.potential = kind == GroundStateKind::R ? std::pow(a, exponent + 2) * std::pow(b, -n) * n_phi
                                              : std::pow(a, 4) * std::pow(b, exponent - 2.0 * n) * n_phi;
    GridSpec scaled = grid;
    scaled.length = grid.length / b;
    gs.field = ComplexField(scaled, a * phi.values);
    return gs;
}

PohozaevResiduals pohozaev_residuals(const GroundState& gs)
{
    PohozaevResiduals r;
    r.kinetic_mass = std::abs(gs.kinetic - gs.mass) / gs.mass;
    const double factor = gs.kind == GroundStateKind::R ? 2.0 * (gs.exponent + 2) / (gs.n * gs.exponent)
                                                        : 4.0 / gs.exponent;
    r.potential = std::abs(gs.potential - factor * gs.kinetic) / gs.potential;
    return r;
}

SharpConstants sharp_constants(const GroundState& gs)
{
    SharpConstants sc;
    sc.kind = gs.kind;
    sc.n = gs.n;
    sc.exponent = gs.exponent;
    sc.mass = gs.mass;
    sc.kinetic = gs.kinetic;
    sc.potential = gs.potential;
    const double n = gs.n;
    if (gs.kind == GroundStateKind::R) {
        const double p = gs.exponent;
        sc.C = 2.0 * (p + 2) / (n * p) * std::pow(gs.kinetic, -0.5 * p);
        sc.E_tilde = (0.5 - 2.0 / (n * p)) * gs.kinetic;
    } else {
        const double gamma = gs.exponent;
        sc.C = 4.0 / gamma / gs.kinetic;
        sc.E_tilde = (0.5 - 1.0 / gamma) * gs.kinetic;
    }
    return sc;
}

ComplexField to_grid(const GroundState& gs, const GridSpec& grid)
{
    if (grid.dim != gs.n) throw ShapeMismatch("grid dimension differs from the ground state's n");
    if (gs.profile.empty()) {
        if (gs.field && gs.field->grid == grid) return *gs.field;
        throw InvalidParameter("ground state has no radial profile to interpolate");
    }
    return sample(grid, [&](const std::array<double, 3>& x) {
        return gs.profile(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    });
}

double gn_ratio(const ComplexField& u, GroundStateKind kind, double exponent)
{
    const double m = lp_integral(u, 2.0);
    const double g = h1_seminorm(u);
    if (!(m > 0.0)) throw DegenerateInput("Gagliardo-Nirenberg ratio of a zero field");
    if (!(g > 0.0)) throw DegenerateInput("Gagliardo-Nirenberg ratio of a field with zero gradient");
    const double norm = std::sqrt(m);
    const int n = u.grid.dim;
    if (kind == GroundStateKind::R) {
        const double p = exponent;
        return lp_integral(u, p + 2) / (std::pow(g, 0.5 * n * p) * std::pow(norm, 0.5 * (4.0 - (n - 2) * p)));
    }
    const double gamma = exponent;
    return hartree_form(u, gamma, ZeroMode::whole_space) / (std::pow(g, gamma) * std::pow(norm, 4.0 - gamma));
}

GnReport gn_check(const ComplexField& u, const SharpConstants& constants)
{
    if (u.grid.dim != constants.n) throw ShapeMismatch("field dimension differs from the constants' n");
    GnReport r;
    r.ratio = gn_ratio(u, constants.kind, constants.exponent);
    r.constant = constants.C;
    r.ratio_over_constant = r.ratio / r.constant;
    return r;
}

GnReport gn_check(const ComplexField& u, const GroundState& gs)
{
    return gn_check(u, sharp_constants(gs));
}

} // namespace nls
