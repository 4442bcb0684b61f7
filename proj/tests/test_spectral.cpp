#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nls/spectral.hpp"

using namespace nls;
using std::numbers::pi;

namespace {

ComplexField random_field(const GridSpec& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ComplexField u(g);
    for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values(i) = cplx(nd(rng), nd(rng));
    return u;
}

ComplexField gaussian(const GridSpec& g, double width = 1.0)
{
    return sample(g, [&](const std::array<double, 3>& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2 * width * width));
    });
}

double rel_l2(const Eigen::ArrayXcd& a, const Eigen::ArrayXcd& b)
{
    return std::sqrt((a - b).abs2().sum() / b.abs2().sum());
}

// Hurwitz zeta by Euler-Maclaurin; valid for real s != 1 (including s < 1).
double hurwitz_zeta(double s, double a)
{
    const int N = 40;
    double sum = 0.0;
    for (int k = 0; k < N; ++k) sum += std::pow(k + a, -s);
    const double x = N + a;
    sum += std::pow(x, 1 - s) / (s - 1) + 0.5 * std::pow(x, -s);
    const double b2j[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730};
    double rising = s;  // s (s+1) ... (s+2j-2)
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= 6; ++j) {
        sum += b2j[j - 1] / fact * rising * std::pow(x, -s - 2 * j + 1);
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= (2 * j + 1) * (2 * j + 2);
    }
    return sum;
}

// Zero-mean periodic kernel (1/L) sum_{k != 0} |k|^-s e^{ikt} in one dimension,
// via sum_m cos(2 pi m x) m^-s = (2pi)^s [zeta(1-s,x) + zeta(1-s,1-x)] / (4 Gamma(s) cos(pi s/2)).
double periodic_riesz_kernel(double t, double s, double L)
{
    double x = std::fmod(t / L, 1.0);
    if (x < 0) x += 1.0;
    const double c = std::pow(2 * pi, s) * (hurwitz_zeta(1 - s, x) + hurwitz_zeta(1 - s, 1 - x))
                   / (4 * std::tgamma(s) * std::cos(pi * s / 2));
    return 2.0 / L * std::pow(L / (2 * pi), s) * c;
}

} // namespace

TEST_CASE("make_grid builds the DFT lattice and rejects bad inputs")
{
    const auto g = make_grid(1, 8, 2 * pi);
    const double expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (int j = 0; j < 8; ++j) CHECK(g.wavenumber(j) == doctest::Approx(expected[j]).epsilon(1e-14));

    const auto g3 = make_grid(3, 64, 32.0);
    CHECK(g3.spacing() == 0.5);
    CHECK(g3.size() == 262144);
    CHECK(make_grid(3, 64, 32.0) == g3);

    CHECK_THROWS_AS(make_grid(2, 7, 10.0), InvalidGrid);
    CHECK_THROWS_AS(make_grid(2, 2, 10.0), InvalidGrid);
    CHECK_THROWS_AS(make_grid(4, 8, 10.0), InvalidGrid);
    CHECK_THROWS_AS(make_grid(1, 8, 0.0), InvalidGrid);
    CHECK_THROWS_AS(make_grid(1, 8, -1.0), InvalidGrid);
}

TEST_CASE("plane wave has a single unit coefficient; delta has a flat spectrum")
{
    const auto g = make_grid(2, 16, 2 * pi);
    const auto u = sample(g, [](const std::array<double, 3>& x) {
        return std::exp(cplx(0.0, 3.0 * x[0] - 2.0 * x[1]));
    });
    const auto c = transform_forward(u);
    Eigen::Index best = 0;
    c.values.abs().maxCoeff(&best);
    const auto idx = g.unflatten(best);
    CHECK(g.mode(idx[0]) == 3);
    CHECK(g.mode(idx[1]) == -2);
    CHECK(std::abs(c.values(best)) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c.values.abs().sum() - std::abs(c.values(best)) < 1e-12);

    ComplexField delta(g);
    delta.values(37) = 1.0;
    const auto cd = transform_forward(delta);
    const double flat = 1.0 / g.size();
    CHECK((cd.values.abs() - flat).abs().maxCoeff() < 1e-15);
}

TEST_CASE("transform matches a direct-summation DFT and round-trips")
{
    const auto g = make_grid(2, 16, 5.0);
    const auto u = random_field(g, 7);
    const auto c = transform_forward(u);
    const int N = g.points;
    double max_err = 0.0;
    for (int m0 = 0; m0 < N; ++m0)
        for (int m1 = 0; m1 < N; ++m1) {
            cplx acc = 0.0;
            for (int j0 = 0; j0 < N; ++j0)
                for (int j1 = 0; j1 < N; ++j1)
                    acc += u.values(j0 * N + j1)
                         * std::exp(cplx(0.0, -2 * pi * (double(m0) * j0 + double(m1) * j1) / N));
            acc /= double(N * N);
            max_err = std::max(max_err, std::abs(acc - c.values(m0 * N + m1)));
        }
    CHECK(max_err <= 1e-12);

    const auto back = transform_inverse(c);
    CHECK((back.values - u.values).abs().maxCoeff() / u.values.abs().maxCoeff() <= 1e-12);
}

TEST_CASE("discrete Parseval holds with the documented normalization")
{
    for (int dim = 1; dim <= 3; ++dim) {
        const auto g = make_grid(dim, dim == 3 ? 16 : 32, 7.5);
        const auto u = random_field(g, 11 + dim);
        const auto c = transform_forward(u);
        const double lhs = u.values.abs2().sum() * g.cell_volume();
        const double rhs = c.values.abs2().sum() * g.box_volume();
        CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
    }
}

TEST_CASE("laplacian: Fourier symbol, constants, and a finite-difference oracle")
{
    const auto g = make_grid(2, 16, 2 * pi);
    const auto u = sample(g, [](const std::array<double, 3>& x) { return std::exp(cplx(0.0, 2 * x[0] + x[1])); });
    const auto lu = apply_laplacian(u);
    CHECK(rel_l2(lu.values, -5.0 * u.values) <= 1e-12);

    ComplexField c(g);
    c.values.setConstant(cplx(2.0, -1.0));
    CHECK(apply_laplacian(c).values.abs().maxCoeff() <= 1e-13);

    // Centered second difference of the analytic Gaussian with a tiny step.
    const auto g1 = make_grid(1, 256, 40.0);
    const auto gauss = [](double x) { return std::exp(-x * x / 2); };
    const auto v = sample(g1, [&](const std::array<double, 3>& x) { return gauss(x[0]); });
    Eigen::ArrayXcd fd(g1.size());
    const double d = 1e-3;
    for (int j = 0; j < g1.points; ++j) {
        const double x = g1.coordinate(j);
        fd(j) = (gauss(x + d) - 2 * gauss(x) + gauss(x - d)) / (d * d);
    }
    CHECK(rel_l2(apply_laplacian(v).values, fd) <= 1e-6);
}

TEST_CASE("laplacian and riesz_inverse are linear")
{
    const auto g = make_grid(2, 32, 9.0);
    const auto u = random_field(g, 1);
    const auto v = random_field(g, 2);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    ComplexField w(g, a * u.values + b * v.values);
    const auto lhs = apply_laplacian(w).values;
    const auto rhs = a * apply_laplacian(u).values + b * apply_laplacian(v).values;
    CHECK((lhs - rhs).abs().maxCoeff() <= 1e-12 * rhs.abs().maxCoeff());

    RealField f(g, u.values.real()), h(g, v.values.real());
    RealField fh(g, 0.7 * f.values - 1.9 * h.values);
    const auto r = riesz_inverse(fh, 0.8).values;
    const auto rr = 0.7 * riesz_inverse(f, 0.8).values - 1.9 * riesz_inverse(h, 0.8).values;
    CHECK((r - rr).abs().maxCoeff() <= 1e-12 * rr.abs().maxCoeff());
}

TEST_CASE("riesz_inverse: unit wavenumber, constants, exponent range")
{
    const auto g = make_grid(2, 16, 2 * pi);
    RealField f(g);
    for (std::int64_t i = 0; i < g.size(); ++i) f.values(i) = std::cos(g.coordinate(g.unflatten(i)[1]));
    const auto r = riesz_inverse(f, 1.3);
    CHECK((r.values - f.values).abs().maxCoeff() <= 1e-13);

    RealField c(g);
    c.values.setConstant(4.0);
    CHECK(riesz_inverse(c, 1.0).values.abs().maxCoeff() <= 1e-14);

    CHECK_THROWS_AS(riesz_inverse(f, 0.0), InvalidExponent);
    CHECK_THROWS_AS(riesz_inverse(f, -1.0), InvalidExponent);
    CHECK_THROWS_AS(riesz_inverse(f, 2.0), InvalidExponent);
}

TEST_CASE("riesz_inverse of a real field has no imaginary residue")
{
    // Complex route through the full c2c spectrum as an independent check.
    const auto g = make_grid(3, 16, 6.0);
    const auto u = random_field(g, 5);
    RealField f(g, u.values.real());
    const auto& ctx = spectral_context(g);
    Eigen::ArrayXcd hat;
    ctx.forward(f.values.cast<cplx>(), hat);
    Eigen::ArrayXd mult = ctx.k_squared().pow(-0.25);
    mult(0) = 0.0;
    hat *= mult / double(g.size());
    Eigen::ArrayXcd back;
    ctx.backward(hat, back);
    CHECK(back.imag().abs().maxCoeff() <= 1e-12 * back.real().abs().maxCoeff());
    CHECK((back.real() - riesz_inverse(f, 0.5).values).abs().maxCoeff()
          <= 1e-12 * back.real().abs().maxCoeff());
}

TEST_CASE("riesz_inverse agrees with a real-space periodic convolution")
{
    // Singular-kernel quadrature: substitute t = tau^2 on each side of the
    // singularity so that |t|^(-1/2) becomes bounded.
    const double s = 0.5, L = 2 * pi;
    const auto g = make_grid(1, 32, L);
    const auto f_of = [](double y) { return std::cos(y) + 0.5 * std::sin(3 * y) - 0.2 * std::cos(5 * y); };
    RealField f(g);
    for (int j = 0; j < g.points; ++j) f.values(j) = f_of(g.coordinate(j));
    const auto spectral = riesz_inverse(f, s);

    double num = 0, den = 0;
    const int Q = 4000;
    const double tmax = std::sqrt(L / 2);
    for (int i = 0; i < g.points; i += 3) {
        const double x = g.coordinate(i);
        double acc = 0.0;
        for (int q = 0; q < Q; ++q) {
            const double tau = (q + 0.5) * tmax / Q;  // midpoint rule in tau
            const double t = tau * tau;
            const double k = periodic_riesz_kernel(t, s, L);
            acc += k * (f_of(x - t) + f_of(x + t)) * 2 * tau * tmax / Q;
        }
        num += (acc - spectral.values(i)) * (acc - spectral.values(i));
        den += spectral.values(i) * spectral.values(i);
    }
    CHECK(std::sqrt(num / den) <= 1e-3);
}

TEST_CASE("hartree_potential edge cases")
{
    const auto g = make_grid(3, 16, 10.0);
    ComplexField zero(g);
    CHECK(hartree_potential(zero, 2.0).values.abs().maxCoeff() == 0.0);

    const auto wave = sample(g, [&](const std::array<double, 3>& x) {
        return 0.7 * std::exp(cplx(0.0, 2 * pi / g.length * (x[0] + 2 * x[2])));
    });
    CHECK(hartree_potential(wave, 2.0).values.abs().maxCoeff() <= 1e-13);

    CHECK_THROWS_AS(hartree_potential(wave, 3.5), InvalidExponent);
    CHECK_THROWS_AS(hartree_potential(wave, 0.0), InvalidExponent);
    CHECK_NOTHROW(hartree_potential(wave, 3.0));
}

TEST_CASE("hartree energy equals the double-sum quadratic form of the same kernel")
{
    const auto g = make_grid(3, 24, 24.0);
    const double gamma = 2.0;
    const auto u = gaussian(g, 2.0);
    const double spectral = hartree_form(u, gamma);

    // Real-space kernel K(x_i - x_j) built from the same multiplier.
    const auto& ctx = spectral_context(g);
    Eigen::ArrayXcd hat = ctx.k_squared().pow(-0.5 * (3 - gamma)).cast<cplx>();
    hat(0) = 0.0;
    hat /= g.box_volume();
    Eigen::ArrayXcd kernel;
    ctx.backward(hat, kernel);
    const Eigen::ArrayXd rho = u.values.abs2();
    const int N = g.points;
    long double acc = 0.0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        const auto a = g.unflatten(i);
        for (std::int64_t j = 0; j < g.size(); ++j) {
            const auto b = g.unflatten(j);
            const int d0 = (a[0] - b[0] + N) % N, d1 = (a[1] - b[1] + N) % N, d2 = (a[2] - b[2] + N) % N;
            acc += rho(i) * rho(j) * kernel((d0 * N + d1) * N + d2).real();
        }
    }
    const double direct = static_cast<double>(acc) * g.cell_volume() * g.cell_volume();
    CHECK(std::abs(spectral - direct) <= 1e-10 * std::abs(direct));
}

TEST_CASE("hartree quadratic form is symmetric")
{
    const auto g = make_grid(3, 16, 12.0);
    const auto u = gaussian(g, 1.5);
    auto v = sample(g, [](const std::array<double, 3>& x) {
        return std::exp(-((x[0] - 1) * (x[0] - 1) + x[1] * x[1] + (x[2] + 0.5) * (x[2] + 0.5)));
    });
    for (ZeroMode zm : {ZeroMode::drop, ZeroMode::whole_space}) {
        const double a = hartree_form(u, v, 2.3, zm);
        const double b = hartree_form(v, u, 2.3, zm);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    }
}

TEST_CASE("Lp norms: constants, sup norm, Gaussian integral")
{
    const auto g = make_grid(2, 8, 3.0);
    ComplexField c(g);
    c.values.setConstant(cplx(0.0, -2.0));
    for (double r : {1.0, 2.0, 3.5}) CHECK(lp_norm(c, r) == doctest::Approx(2.0 * std::pow(9.0, 1 / r)).epsilon(1e-13));
    c.values(5) = 7.0;
    CHECK(lp_norm(c, infinity) == 7.0);

    const auto g3 = make_grid(3, 64, 40.0);
    const auto u = gaussian(g3);
    CHECK(std::abs(lp_norm(u, 2.0) - std::pow(pi, 0.75)) <= 1e-8 * std::pow(pi, 0.75));
    // ||grad e^{-|x|^2/2}||^2 = (3/2) pi^{3/2}; needs a finer spacing than the mass.
    CHECK(h1_seminorm(gaussian(make_grid(3, 64, 32.0))) == doctest::Approx(std::sqrt(1.5 * std::pow(pi, 1.5))).epsilon(1e-10));
}

TEST_CASE("Epstein zeta matches known lattice constants")
{
    // Regularized sum over Z^3 of |m|^-2 (Madelung-type constant).
    CHECK(epstein_zeta(3, 2.0) == doctest::Approx(-8.91363291758519).epsilon(1e-11));
    // Smooth-cutoff extrapolation, computed independently.
    CHECK(epstein_zeta(3, 0.5) == doctest::Approx(-1.70228419603435).epsilon(1e-11));
    CHECK(epstein_zeta(2, 1.0) == doctest::Approx(-3.9002649200019).epsilon(1e-10));
    CHECK(epstein_zeta(3, 0.0) == -1.0);
}

TEST_CASE("whole-space zero mode recovers the free-space Hartree energy")
{
    // u = e^{-|x|^2/2}: int (K * u^2) u^2 = (pi/2) 2^{(1-s)/2} Gamma((3-s)/2), s = n - gamma.
    const double gamma = 2.5, s = 0.5;
    const double exact = pi / 2 * std::pow(2.0, (1 - s) / 2) * std::tgamma((3 - s) / 2);
    const auto g = make_grid(3, 48, 20.0);
    const auto u = gaussian(g);
    const double ws = hartree_form(u, gamma, ZeroMode::whole_space);
    const double dropped = hartree_form(u, gamma, ZeroMode::drop);
    CHECK(std::abs(ws - exact) <= 3e-5 * exact);
    CHECK(std::abs(dropped - exact) > 100 * std::abs(ws - exact));

    // The remaining error decays like L^-(n - s + 2).
    const auto g2 = make_grid(3, 96, 40.0);
    const double ws2 = hartree_form(gaussian(g2), gamma, ZeroMode::whole_space);
    const double order = std::log2(std::abs(ws - exact) / std::abs(ws2 - exact));
    CHECK(order == doctest::Approx(3 - s + 2).epsilon(0.05));

    // gamma = n: the multiplier is the identity, so the form is int |u|^4.
    const double local = hartree_form(u, 3.0, ZeroMode::whole_space);
    CHECK(local == doctest::Approx(lp_integral(u, 4.0)).epsilon(1e-12));
}

TEST_CASE("boundary mass fraction flags wide fields")
{
    const auto g = make_grid(2, 32, 16.0);
    CHECK(boundary_mass_fraction(gaussian(g, 1.0)) < 1e-12);
    CHECK(boundary_mass_fraction(gaussian(g, 6.0)) > 1e-3);
}

TEST_CASE("dealias removes the top third of modes")
{
    const auto g = make_grid(1, 12, 2 * pi);
    const auto u = sample(g, [](const std::array<double, 3>& x) { return std::cos(2 * x[0]) + std::cos(5 * x[0]); });
    const auto d = dealias(u);
    for (int j = 0; j < g.points; ++j)
        CHECK(d.values(j).real() == doctest::Approx(std::cos(2 * g.coordinate(j))).epsilon(1e-12));
}
