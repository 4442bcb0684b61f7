#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nls/dynamics.hpp"
#include "nls/ground_state.hpp"
#include "nls/spectral.hpp"

using namespace nls;
using std::numbers::pi;

namespace {

const GroundState& cubic_R()
{
    static const GroundState gs = shoot_R(3, 2.0);
    return gs;
}

const GroundState& flow_R()
{
    static const GroundState gs = flow_ground_state(GroundStateKind::R, 3, 2.0, make_grid(3, 96, 32.0));
    return gs;
}

const GroundState& flow_W()
{
    static const GroundState gs = flow_ground_state(GroundStateKind::W, 3, 2.5, make_grid(3, 96, 32.0));
    return gs;
}

/// GN quotient ||u||_4^4 / (||grad u||^3 ||u||) in R^3 for u = sum c_i e^{-a_i r^2},
/// from the closed-form Gaussian moments.
double gaussian_sum_ratio(const std::vector<double>& c, const std::vector<double>& a)
{
    const std::size_t m = c.size();
    double M = 0, G = 0, P = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double s = a[i] + a[j];
            M += c[i] * c[j] * std::pow(pi / s, 1.5);
            G += 4 * a[i] * a[j] * c[i] * c[j] * 1.5 * std::pow(pi, 1.5) / std::pow(s, 2.5);
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    P += c[i] * c[j] * c[k] * c[l] * std::pow(pi / (s + a[k] + a[l]), 1.5);
        }
    return P / (std::pow(G, 1.5) * std::sqrt(M));
}

ComplexField random_smooth_field(const GridSpec& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int bumps = 1 + static_cast<int>(3 * unif(rng));
    ComplexField u(g);
    for (int b = 0; b < bumps; ++b) {
        const std::array<double, 3> c{4 * unif(rng) - 2, 4 * unif(rng) - 2, 4 * unif(rng) - 2};
        const std::array<double, 3> kv{unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5};
        const double w = 1.0 + 1.5 * unif(rng);
        const cplx amp = std::polar(0.2 + unif(rng), 2 * pi * unif(rng));
        u.values += sample(g, [&](const std::array<double, 3>& x) {
                        double r2 = 0, phase = 0;
                        for (int a = 0; a < 3; ++a) {
                            r2 += (x[a] - c[a]) * (x[a] - c[a]);
                            phase += kv[a] * x[a];
                        }
                        return amp * std::exp(cplx(-r2 / (2 * w * w), phase));
                    }).values;
    }
    return u;
}

} // namespace

TEST_CASE("shoot_R reproduces the one-dimensional sech profile")
{
    for (double p : {1.0, 2.0, 3.0}) {
        const auto gs = shoot_R(1, p);
        const double mu = (4 + p) / p;
        CHECK(gs.mu == doctest::Approx(mu));
        double err = 0.0;
        for (double x = 0.0; x < 8.0; x += 0.137) {
            const double exact = std::pow((p + 2) * mu / 2, 1 / p) * std::pow(1 / std::cosh(p * std::sqrt(mu) * x / 2), 2 / p);
            err = std::max(err, std::abs(gs.profile(x) - exact));
        }
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("shoot_R: cubic profile in three dimensions")
{
    const auto& gs = cubic_R();
    CHECK(gs.mu == doctest::Approx(1.0 / 3));
    const auto& v = gs.profile.value;
    bool monotone = true, positive = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) monotone = monotone && v[i + 1] <= v[i];
    for (double x : v) positive = positive && x > 0.0;
    CHECK(monotone);
    CHECK(positive);
    CHECK(gs.residual <= 1e-6);
    CHECK(std::abs(gs.kinetic - gs.mass) / gs.mass <= 1e-4);
    CHECK(std::abs(gs.potential - 2.0 * 4 / 6 * gs.kinetic) / gs.potential <= 1e-4);
    // R(0) of the cubic ground state at mu = 1 is 4.3373; here R = mu^(1/2) R_1(mu^(1/2) r).
    CHECK(v[0] == doctest::Approx(4.3373 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("shoot_R rejects exponents outside the existence range")
{
    CHECK_THROWS_AS(shoot_R(3, 4.0), InvalidExponent);
    CHECK_THROWS_AS(shoot_R(3, 5.0), InvalidExponent);
    CHECK_THROWS_AS(shoot_R(2, 0.0), InvalidExponent);
    CHECK_THROWS_AS(shoot_R(4, 1.0), InvalidParameter);
    CHECK_NOTHROW(shoot_R(2, 6.0));
}

TEST_CASE("flow R agrees with shooting")
{
    const auto& sh = cubic_R();
    const auto& fl = flow_R();
    CHECK(std::abs(fl.mass - sh.mass) / sh.mass <= 1e-3);
    CHECK(std::abs(fl.kinetic - fl.mass) / fl.mass <= 1e-3);
    CHECK(std::abs(fl.potential - 2.0 * 4 / 6 * fl.kinetic) / fl.potential <= 1e-3);
    REQUIRE(fl.field);
    const auto interp = to_grid(sh, fl.field->grid);
    const double diff = std::sqrt((interp.values - fl.field->values).abs2().sum() / interp.values.abs2().sum());
    CHECK(diff <= 1e-2);
    CHECK((fl.field->values.real() > 0.0).all());
}

TEST_CASE("flow W satisfies its Pohozaev identities")
{
    const auto& w = flow_W();
    CHECK(w.mu == doctest::Approx(0.6));
    CHECK(std::abs(w.kinetic - w.mass) / w.mass <= 1e-3);
    CHECK(std::abs(w.potential - 4 / 2.5 * w.kinetic) / w.potential <= 1e-3);
    CHECK(w.edge_ratio <= 1e-5);

    const auto g = make_grid(3, 16, 16.0);
    CHECK_THROWS_AS(flow_ground_state(GroundStateKind::W, 3, 3.5, g), InvalidExponent);
    CHECK_THROWS_AS(flow_ground_state(GroundStateKind::W, 3, 3.0, g), InvalidExponent);
    CHECK_THROWS_AS(flow_ground_state(GroundStateKind::R, 3, 4.0, g), InvalidExponent);
    CHECK_THROWS_AS(flow_ground_state(GroundStateKind::R, 2, 2.0, g), ShapeMismatch);
}

TEST_CASE("a converged ground state is a fixed point of the flow")
{
    for (const GroundState* gs : {&flow_R(), &flow_W()}) {
        EquationParams params;
        params.n = 3;
        params.p = gs->kind == GroundStateKind::R ? gs->exponent : 2.0;
        params.gamma = gs->kind == GroundStateKind::W ? gs->exponent : 1.0;
        const FlowMode mode = gs->kind == GroundStateKind::R ? FlowMode::power_only : FlowMode::hartree_only;
        const auto next = gradient_flow_step(*gs->field, 0.1, params, gs->mu, mode);
        const double change = std::sqrt((next.values - gs->field->values).abs2().sum() / gs->field->values.abs2().sum());
        CHECK(change <= 1e-10);
    }
}

TEST_CASE("boundary contamination is reported")
{
    FlowOptions tight;
    tight.edge_tolerance = 1e-12;
    CHECK_THROWS_AS(flow_ground_state(GroundStateKind::W, 3, 2.5, make_grid(3, 32, 16.0), tight), BoundaryContamination);
}

TEST_CASE("sharp constants follow the ground-state formulas")
{
    GroundState w;
    w.kind = GroundStateKind::W;
    w.n = 5;
    w.exponent = 4.0;
    w.kinetic = 2.0;
    CHECK(sharp_constants(w).E_tilde == doctest::Approx(0.25 * 2.0));
    CHECK(sharp_constants(w).C == doctest::Approx(0.5));

    GroundState r;
    r.kind = GroundStateKind::R;
    r.n = 3;
    r.exponent = 4.0 / 3;
    r.kinetic = 7.0;
    CHECK(sharp_constants(r).E_tilde == doctest::Approx(0.0));

    const auto sc = sharp_constants(cubic_R());
    CHECK(sc.C == doctest::Approx(2.0 * 4 / 6 * std::pow(cubic_R().kinetic, -1.0)));
    CHECK(sc.E_tilde == doctest::Approx((0.5 - 1.0 / 3) * cubic_R().kinetic));
}

TEST_CASE("C_R lies within 2% above the best two-Gaussian quotient")
{
    double best = 0.0;
    for (double c = -0.5; c <= 3.0; c += 0.05)
        for (double s = 0.05; s <= 1.0; s += 0.01)
            best = std::max(best, gaussian_sum_ratio({1.0, c}, {1.0, 1.0 / (s * s)}));
    const double C = sharp_constants(cubic_R()).C;
    CHECK(best <= C);
    CHECK(best >= 0.98 * C);
}

TEST_CASE("gn_check: degenerate input, extremality, scale invariance")
{
    const auto g = make_grid(3, 64, 32.0);
    ComplexField zero(g);
    CHECK_THROWS_AS(gn_check(zero, cubic_R()), DegenerateInput);
    ComplexField flat(g);
    flat.values.setConstant(1.0);
    CHECK_THROWS_AS(gn_check(flat, cubic_R()), DegenerateInput);

    // Truncating the tail at the box raises the quotient, so the box must
    // hold the dilated profile down to about 1e-4 of its peak.
    const auto fine = make_grid(3, 128, 32.0);
    for (double sigma : {0.8, 1.0}) {
        const auto& sh = cubic_R();
        const auto u = sample(fine, [&](const std::array<double, 3>& x) {
            return 2.7 * sh.profile(sigma * std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        });
        const double q = gn_check(u, sh).ratio_over_constant;
        CHECK(q >= 1 - 1e-3);
        CHECK(q <= 1 + 1e-6);
    }

    std::mt19937_64 rng(42);
    const auto u = random_smooth_field(make_grid(3, 32, 16.0), rng);
    const double base = gn_ratio(u, GroundStateKind::R, 2.0);
    // c u(sigma x) sampled on the grid scaled by 1/sigma has the same samples.
    ComplexField scaled(make_grid(3, 32, 16.0 / 1.7), cplx(-0.4, 2.0) * u.values);
    CHECK(gn_ratio(scaled, GroundStateKind::R, 2.0) == doctest::Approx(base).epsilon(1e-8));
    CHECK(gn_ratio(scaled, GroundStateKind::W, 2.5) == doctest::Approx(gn_ratio(u, GroundStateKind::W, 2.5)).epsilon(1e-8));
}

TEST_CASE("random smooth fields stay below both sharp constants")
{
    const auto cr = sharp_constants(cubic_R());
    const auto cw = sharp_constants(flow_W());
    const auto g = make_grid(3, 32, 16.0);
    std::mt19937_64 rng(2024);
    double worst_r = 0, worst_w = 0;
    for (int i = 0; i < 100; ++i) {
        const auto u = random_smooth_field(g, rng);
        worst_r = std::max(worst_r, gn_check(u, cr).ratio_over_constant);
        worst_w = std::max(worst_w, gn_check(u, cw).ratio_over_constant);
    }
    CHECK(worst_r <= 1 + 1e-6);
    CHECK(worst_w <= 1 + 1e-6);
    CHECK(gn_check(*flow_W().field, cw).ratio_over_constant >= 0.999);
}
