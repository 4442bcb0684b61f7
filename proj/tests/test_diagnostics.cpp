#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nls/diagnostics.hpp"

using namespace nls;
using std::numbers::pi;

namespace {

EquationParams params(int n, double p, double gamma, double l1, double l2)
{
    EquationParams e;
    e.n = n;
    e.p = p;
    e.gamma = gamma;
    e.lambda1 = l1;
    e.lambda2 = l2;
    return e;
}

ComplexField gaussian(const GridSpec& g, double amp, double width)
{
    return sample(g, [&](const std::array<double, 3>& x) {
        return amp * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2 * width * width));
    });
}

/// Gaussian with a linear phase and a chirp, so that f'(0) != 0.
ComplexField moving_gaussian(const GridSpec& g, double amp, double width)
{
    return sample(g, [&](const std::array<double, 3>& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        return amp * std::exp(cplx(-r2 / (2 * width * width), 0.3 * x[0] - 0.1 * r2));
    });
}

ObservableSeries record_run(const ComplexField& u0, const EquationParams& P, double dt, double t_end, int cadence)
{
    ObservableRecorder rec(P);
    EvolutionConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.cadence = cadence;
    const auto tr = evolve(u0, P, c, {rec.observer()});
    REQUIRE(tr.termination == Termination::completed);
    return rec.series();
}

} // namespace

TEST_CASE("mass and energy of trivial fields")
{
    const auto g = make_grid(3, 16, 2 * pi);
    const auto P = params(3, 2, 2, 1, 1);
    ComplexField zero(g);
    CHECK(mass(zero) == 0.0);
    CHECK(energy(zero, P) == 0.0);

    const cplx c(0.3, -0.4);
    const auto wave = sample(g, [&](const std::array<double, 3>& x) { return c * std::exp(cplx(0.0, 2 * x[0] + x[2])); });
    const auto e = energy_terms(wave, P);
    const double V = g.box_volume();
    CHECK(e.kinetic == doctest::Approx(0.5 * 5 * std::norm(c) * V).epsilon(1e-12));
    CHECK(std::abs(e.pot_hartree) <= 1e-14);
    CHECK(mass(wave) == doctest::Approx(std::norm(c) * V).epsilon(1e-12));

    CHECK_THROWS_AS(energy(wave, params(2, 2, 1, 1, 1)), ShapeMismatch);
}

TEST_CASE("energy of a Gaussian matches an independent quadrature")
{
    const auto g = make_grid(3, 32, 16.0);
    const auto P = params(3, 2, 2, 1, 1);
    const auto u = gaussian(g, 0.8, 1.3);
    const double h3 = g.cell_volume();

    double kinetic = 0.0;
    for (const auto& d : gradient(u)) kinetic += 0.5 * d.values.abs2().sum() * h3;
    double power = 0.0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i) power += std::pow(std::norm(u.values(i)), 2) * h3;
    RealField rho(g);
    rho.values = u.values.abs2();
    const RealField pot = riesz_inverse(rho, 3 - P.gamma);
    const double hartree = (pot.values * rho.values).sum() * h3;
    const double oracle = kinetic + power / 4 + hartree / 4;

    CHECK(energy(u, P) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("variance and virial: real fields, gauge invariance, boundary flag")
{
    const auto g = make_grid(3, 32, 16.0);
    const auto u = gaussian(g, 1.0, 1.2);
    CHECK(std::abs(virial_first(u)) <= 1e-12 * variance(u));
    // f = a^2 (pi w^2)^(3/2) * 3 w^2 / 2 for a^2 e^{-r^2/w^2}.
    CHECK(variance(u) == doctest::Approx(std::pow(pi * 1.44, 1.5) * 1.5 * 1.44).epsilon(1e-10));
    CHECK_FALSE(boundary_contaminated(u));
    CHECK(boundary_contaminated(gaussian(g, 1.0, 4.0)));

    const auto P = params(3, 1.5, 2.5, -1, 0.7);
    const auto v = moving_gaussian(g, 1.0, 1.2);
    ComplexField rotated(g, std::exp(cplx(0.0, 1.1)) * v.values);
    CHECK(variance(rotated) == doctest::Approx(variance(v)).epsilon(1e-13));
    CHECK(virial_first(rotated) == doctest::Approx(virial_first(v)).epsilon(1e-12));
    CHECK(energy(rotated, P) == doctest::Approx(energy(v, P)).epsilon(1e-12));
    CHECK(virial_second_formula(rotated, P) == doctest::Approx(virial_second_formula(v, P)).epsilon(1e-12));
    CHECK(mass(rotated) == doctest::Approx(mass(v)).epsilon(1e-13));
}

TEST_CASE("free evolution: time derivative of the variance matches the virial")
{
    const auto g = make_grid(3, 64, 24.0);
    const auto s = record_run(moving_gaussian(g, 1.0, 1.5), params(3, 2, 2, 0, 0), 1e-2, 1.0, 5);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double fd = (s.f[i + 1] - s.f[i - 1]) / (s.t[i + 1] - s.t[i - 1]);
        worst = std::max(worst, std::abs(fd - s.fprime[i]) / std::abs(s.fprime[i]));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("virial_second_formula: limiting coefficient cases")
{
    const auto g = make_grid(3, 32, 16.0);
    const auto u = moving_gaussian(g, 0.9, 1.3);
    const auto free = params(3, 2, 2.5, 0, 0);
    CHECK(virial_second_formula(u, free) == doctest::Approx(16 * energy(u, free)).epsilon(1e-13));

    const auto with = params(3, 2, 2, 1, 3);
    const auto without = params(3, 2, 2, 1, 0);
    const double a = virial_second_formula(u, with) - 16 * energy(u, with, ZeroMode::whole_space);
    const double b = virial_second_formula(u, without) - 16 * energy(u, without, ZeroMode::whole_space);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("second difference of the variance closes the virial identity")
{
    const auto g = make_grid(3, 48, 16.0);
    struct Case {
        double l1, l2, gamma;
    };
    for (const Case c : {Case{1, 1, 1.5}, Case{1, 1, 2.5}, Case{-1, -1, 2.5}, Case{1, -1, 2.5}, Case{-1, 1, 1.5}}) {
        CAPTURE(c.l1);
        CAPTURE(c.l2);
        CAPTURE(c.gamma);
        const auto s = record_run(moving_gaussian(g, 1.0, 1.0), params(3, 2, c.gamma, c.l1, c.l2), 1e-3, 0.4, 10);
        const auto closure = virial_closure(s);
        CHECK(closure.boundary_clear);
        CHECK(closure.max_rel_error <= 1e-3);
    }
}

TEST_CASE("defocusing run: mass drift and second-order energy drift")
{
    const auto g = make_grid(3, 32, 16.0);
    const auto P = params(3, 2, 2.5, 1, 1);
    const auto u0 = moving_gaussian(g, 1.0, 1.2);
    auto drift = [&](double dt) {
        const auto s = record_run(u0, P, dt, 1.0, 1);
        double dm = 0.0, de = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            dm = std::max(dm, std::abs(s.M[i] - s.M[0]) / s.M[0]);
            de = std::max(de, std::abs(s.E[i] - s.E[0]));
        }
        return std::make_pair(dm, de);
    };
    const auto coarse = drift(0.02);
    const auto fine = drift(0.01);
    CHECK(coarse.first <= 1e-10);
    CHECK(fine.first <= 1e-10);
    const double ratio = coarse.second / fine.second;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("theta_bound: value, sign criterion, roots")
{
    CHECK(theta_bound(0.0, 3.0, 0.4, -2.0).value == 3.0);

    const auto neg = theta_bound(1.0, 3.0, 0.0, -2.0);
    CHECK(neg.value == doctest::Approx(3.0 - 1.0));
    CHECK(neg.attains_negative);
    REQUIRE(neg.root);
    CHECK(*neg.root == doctest::Approx(std::sqrt(2 * 3.0 / 2.0)));

    const auto pos = theta_bound(1.0, 3.0, 0.0, 2.0);
    CHECK_FALSE(pos.attains_negative);
    CHECK_FALSE(pos.root);

    // A > 0 with a strongly inward moment: 8 I^2 = 32 > A f0 = 6.
    const auto inward = theta_bound(0.0, 3.0, -2.0, 2.0);
    CHECK(inward.attains_negative);
    REQUIRE(inward.root);
    const double t = *inward.root;
    CHECK(3.0 - 8.0 * t + t * t == doctest::Approx(0.0).scale(1.0));
    CHECK(t == doctest::Approx(4.0 - std::sqrt(13.0)));

    const auto linear = theta_bound(0.0, 3.0, -0.5, 0.0);
    REQUIRE(linear.root);
    CHECK(*linear.root == doctest::Approx(1.5));
}

TEST_CASE("blowup_detector on synthetic and simulated series")
{
    ObservableSeries s;
    for (int i = 0; i <= 10; ++i) {
        const double t = 0.1 * i;
        s.t.push_back(t);
        s.f.push_back(1.0 - t * t + 1e-3);
        s.fprime.push_back(-2 * t);
        s.fsecond_formula.push_back(-2.0);
    }
    Trajectory done;
    done.termination = Termination::completed;
    const auto fired = blowup_detector(s, done, -2.0);
    CHECK(fired.fired);
    CHECK(fired.reason == "variance_collapse");
    CHECK(fired.window_end == doctest::Approx(1.0));
    REQUIRE(fired.theta_root);
    CHECK(*fired.theta_root == doctest::Approx(std::sqrt(1.001)));
    CHECK(fired.within_theta_bound == true);
    // f'' above A: the collapse does not count.
    CHECK_FALSE(blowup_detector(s, done, -3.0).fired);

    const auto g = make_grid(3, 32, 16.0);
    const auto free = record_run(moving_gaussian(g, 1.0, 1.2), params(3, 2, 2, 0, 0), 1e-2, 1.0, 10);
    CHECK_FALSE(blowup_detector(free, done).fired);

    const auto P = params(3, 2, 2.5, -5, -5);
    ObservableRecorder rec(P);
    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 0.5;
    c.guard_amplitude = 0.9;
    const auto tr = evolve(gaussian(g, 1.0, 1.0), P, c, {rec.observer()});
    const auto tripped = blowup_detector(rec.series(), tr);
    CHECK(tripped.fired);
    CHECK(tripped.reason == "guard_tripped");
    CHECK(tripped.window_end == tr.t_final);
    CHECK(tripped.window_start < tripped.window_end);
}

TEST_CASE("defocusing couplings never trigger the blow-up detector")
{
    const auto g = make_grid(3, 32, 24.0);
    const auto s = record_run(gaussian(g, 1.0, 1.5), params(3, 2, 2.5, 1, 1), 1e-2, 10.0, 20);
    Trajectory done;
    CHECK_FALSE(blowup_detector(s, done).fired);
}

TEST_CASE("scattering monitor: free evolution has constant profile")
{
    const auto g = make_grid(3, 32, 16.0);
    ScatteringMonitor mon(params(3, 2, 2, 0, 0));
    EvolutionConfig c;
    c.dt = 1e-2;
    c.t_end = 1.0;
    c.cadence = 10;
    const auto u0 = moving_gaussian(g, 1.0, 1.2);
    evolve(u0, params(3, 2, 2, 0, 0), c, {mon.observer()});
    const auto r = mon.report();
    REQUIRE(r.cauchy.size() == 10);
    const double h1 = std::sqrt(mass(u0) + std::pow(h1_seminorm(u0), 2));
    for (double d : r.cauchy) CHECK(d <= 1e-12 * h1);
    CHECK_FALSE(r.scattering_consistent);
    CHECK(r.label.find("proxy") != std::string::npos);
}

TEST_CASE("norm specs and space-time accumulation")
{
    const auto z = norm_spec("Z", 3);
    CHECK(z.q == 4.0);
    CHECK(z.r == 4.0);
    CHECK(norm_spec("U", 3).r == doctest::Approx(18.0 / 7));
    CHECK(norm_spec("V", 3).q == doctest::Approx(10.0 / 3));
    CHECK(norm_spec("W", 3).r == doctest::Approx(10.0));
    CHECK_THROWS_AS(norm_spec("W", 2), InvalidParameter);
    CHECK_THROWS_AS(norm_spec("Q", 3), InvalidParameter);

    const auto g = make_grid(3, 16, 8.0);
    const auto u = gaussian(g, 1.0, 1.0);
    SpacetimeAccumulator acc({z, norm_spec("U", 3)});
    for (int i = 0; i <= 20; ++i) acc.record(0.1 * i, u);
    CHECK(acc.value(0) == doctest::Approx(std::pow(2.0, 0.25) * lp_norm(u, 4.0)).epsilon(1e-12));
    CHECK(acc.value(1) == doctest::Approx(std::pow(2.0, 1.0 / 6) * lp_norm(u, 18.0 / 7)).epsilon(1e-12));

    SpacetimeAccumulator few({z});
    for (int i = 0; i < 9; ++i) few.record(0.1 * i, u);
    CHECK_THROWS_AS(few.value(0), InsufficientSamples);

    // Coarse trapezoid against a fine midpoint sum of ||u(t)||_r = 1/(1+t^2).
    auto norm_at = [](double t) { return 1.0 / (1.0 + t * t); };
    std::vector<double> t, v;
    for (int i = 0; i <= 40; ++i) {
        t.push_back(0.1 * i);
        v.push_back(norm_at(t.back()));
    }
    double fine = 0.0;
    const int m = 400000;
    for (int i = 0; i < m; ++i) fine += std::pow(norm_at((i + 0.5) * 4.0 / m), 4) * 4.0 / m;
    CHECK(spacetime_norm(t, v, 4.0) == doctest::Approx(std::pow(fine, 0.25)).epsilon(1e-3));
}

TEST_CASE("Z norm over sup H1 is stable under grid refinement")
{
    const auto P = params(3, 2, 2.5, 1, 1);
    auto ratio = [&](int N) {
        const auto g = make_grid(3, N, 16.0);
        const auto u0 = gaussian(g, 1.0, 1.2);
        SpacetimeAccumulator acc({norm_spec("Z", 3)});
        double sup_h1 = 0.0;
        Observer h1 = [&](double, const ComplexField& u) {
            sup_h1 = std::max(sup_h1, std::sqrt(mass(u) + std::pow(h1_seminorm(u), 2)));
        };
        EvolutionConfig c;
        c.dt = 5e-3;
        c.t_end = 1.0;
        c.cadence = 5;
        evolve(u0, P, c, {acc.observer(), h1});
        return acc.value(0) / sup_h1;
    };
    const double coarse = ratio(32);
    const double fine = ratio(48);
    CHECK(coarse / fine >= 0.8);
    CHECK(coarse / fine <= 1.2);
}

TEST_CASE("series CSV keeps full precision")
{
    ObservableSeries s;
    s.t = {0.1};
    s.M = {1.0 / 3};
    s.E = {-2.0 / 7};
    s.kinetic = {1.0};
    s.pot_power = {2.0};
    s.pot_hartree = {3.0};
    s.f = {4.0};
    s.fprime = {5.0};
    s.fsecond_formula = {6.0};
    std::ostringstream out;
    s.write_csv(out);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t,M,E,kinetic,pot_power,pot_hartree,f,fprime,fsecond_formula");
    std::istringstream fields(row);
    std::string cell;
    std::vector<double> parsed;
    while (std::getline(fields, cell, ',')) parsed.push_back(std::stod(cell));
    REQUIRE(parsed.size() == 9);
    CHECK(parsed[1] == 1.0 / 3);
    CHECK(parsed[2] == -2.0 / 7);
}
