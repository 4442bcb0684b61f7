#include "nls/spectral.hpp"

#include <fftw3.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace nls {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(Eigen::ArrayXcd& a) { return reinterpret_cast<fftw_complex*>(a.data()); }

fftw_complex* as_fftw(const Eigen::ArrayXcd& a)
{
    // Out-of-place complex transforms leave their input untouched.
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(a.data()));
}

void check_exponent(int dim, double s)
{
    if (!(s > 0.0) || !(s < dim))
        throw InvalidExponent("Riesz exponent s must satisfy 0 < s < n");
}

} // namespace

SpectralContext::SpectralContext(const GridSpec& grid) : grid_(grid)
{
    const int n = grid.dim;
    const int N = grid.points;
    int dims[3] = {N, N, N};
    half_size_ = 1;
    for (int a = 0; a < n - 1; ++a) half_size_ *= N;
    half_size_ *= N / 2 + 1;

    // FFTW_ESTIMATE keeps plan selection deterministic from run to run, which
    // the bitwise reproducibility of output files relies on.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        Eigen::ArrayXcd a(grid.size()), b(grid.size());
        Eigen::ArrayXd r(grid.size());
        Eigen::ArrayXcd h(half_size_);
        plan_fwd_ = fftw_plan_dft(n, dims, as_fftw(a), as_fftw(b), FFTW_FORWARD, flags);
        plan_bwd_ = fftw_plan_dft(n, dims, as_fftw(a), as_fftw(b), FFTW_BACKWARD, flags);
        plan_r2c_ = fftw_plan_dft_r2c(n, dims, r.data(), as_fftw(h), flags);
        plan_c2r_ = fftw_plan_dft_c2r(n, dims, as_fftw(h), r.data(), flags);
    }

    k2_.resize(grid.size());
    r2_.resize(grid.size());
    shell_.resize(grid.size());
    for (int a = 0; a < n; ++a) {
        k_axis_[a].resize(grid.size());
        x_axis_[a].resize(grid.size());
    }
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        double s = 0.0;
        double r2 = 0.0;
        bool shell = false;
        for (int a = 0; a < n; ++a) {
            const double k = grid.wavenumber(idx[a]);
            s += k * k;
            k_axis_[a](i) = (idx[a] == N / 2) ? 0.0 : k;
            const double x = grid.coordinate(idx[a]);
            x_axis_[a](i) = x;
            r2 += x * x;
            shell = shell || idx[a] < 2 || idx[a] >= N - 2;
        }
        k2_(i) = s;
        r2_(i) = r2;
        shell_(i) = shell ? 1.0 : 0.0;
    }

    k2_half_.resize(half_size_);
    const int last = N / 2 + 1;
    for (std::int64_t i = 0; i < half_size_; ++i) {
        std::int64_t rest = i;
        double s = 0.0;
        const int jl = static_cast<int>(rest % last);
        rest /= last;
        const double kl = 2.0 * std::numbers::pi * jl / grid.length;
        // The last axis holds m = 0..N/2; m = N/2 is the Nyquist mode, whose
        // |k| is the same for +N/2 and -N/2.
        s += kl * kl;
        for (int a = n - 2; a >= 0; --a) {
            const int j = static_cast<int>(rest % N);
            rest /= N;
            const double k = grid.wavenumber(j);
            s += k * k;
        }
        k2_half_(i) = s;
    }
}

SpectralContext::~SpectralContext()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (void* p : {plan_fwd_, plan_bwd_, plan_r2c_, plan_c2r_})
        if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

void SpectralContext::forward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const
{
    out.resize(grid_.size());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), as_fftw(in), as_fftw(out));
}

void SpectralContext::backward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const
{
    out.resize(grid_.size());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), as_fftw(in), as_fftw(out));
}

void SpectralContext::forward_real(const Eigen::ArrayXd& in, Eigen::ArrayXcd& out) const
{
    out.resize(half_size_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in.data()),
                         as_fftw(out));
}

void SpectralContext::backward_real(Eigen::ArrayXcd& in, Eigen::ArrayXd& out) const
{
    out.resize(grid_.size());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), as_fftw(in), out.data());
}

const Eigen::ArrayXd& SpectralContext::riesz_multiplier_half(double s, ZeroMode zm) const
{
    const auto key = std::make_pair(s, static_cast<int>(zm));
    auto it = riesz_cache_.find(key);
    if (it != riesz_cache_.end()) return it->second;

    Eigen::ArrayXd m(half_size_);
    if (s == 0.0) {
        m.setOnes();
    } else {
        m = k2_half_.pow(-0.5 * s);
    }
    m(0) = (zm == ZeroMode::drop) ? 0.0 : riesz_zero_mode(grid_, s);
    return riesz_cache_.emplace(key, std::move(m)).first->second;
}

const SpectralContext& spectral_context(const GridSpec& grid)
{
    thread_local std::unordered_map<std::string, std::unique_ptr<SpectralContext>> cache;
    auto key = grid.fingerprint();
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<SpectralContext>(grid)).first;
    return *it->second;
}

SpectralCoefficients transform_forward(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    SpectralCoefficients c{u.grid, {}};
    ctx.forward(u.values, c.values);
    c.values /= static_cast<double>(u.grid.size());
    return c;
}

ComplexField transform_inverse(const SpectralCoefficients& coeffs)
{
    if (coeffs.values.size() != coeffs.grid.size())
        throw ShapeMismatch("coefficient array does not match grid");
    const auto& ctx = spectral_context(coeffs.grid);
    ComplexField u(coeffs.grid);
    ctx.backward(coeffs.values, u.values);
    return u;
}

ComplexField apply_laplacian(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    Eigen::ArrayXcd hat;
    ctx.forward(u.values, hat);
    hat *= -ctx.k_squared() / static_cast<double>(u.grid.size());
    ComplexField out(u.grid);
    ctx.backward(hat, out.values);
    return out;
}

std::array<ComplexField, 3> gradient(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    Eigen::ArrayXcd hat;
    ctx.forward(u.values, hat);
    const double norm = 1.0 / static_cast<double>(u.grid.size());
    std::array<ComplexField, 3> out;
    Eigen::ArrayXcd tmp;
    for (int a = 0; a < u.grid.dim; ++a) {
        tmp = hat * (cplx(0.0, norm) * ctx.k_component(a));
        out[a] = ComplexField(u.grid);
        ctx.backward(tmp, out[a].values);
    }
    return out;
}

namespace {

Eigen::ArrayXd riesz_apply(const SpectralContext& ctx, const Eigen::ArrayXd& f, double s,
                           ZeroMode zm)
{
    Eigen::ArrayXcd hat;
    ctx.forward_real(f, hat);
    hat *= ctx.riesz_multiplier_half(s, zm) / static_cast<double>(ctx.grid().size());
    Eigen::ArrayXd out;
    ctx.backward_real(hat, out);
    return out;
}

double hartree_exponent(int dim, double gamma)
{
    if (!(gamma > 0.0) || gamma > dim)
        throw InvalidExponent("Hartree exponent must satisfy 0 < gamma <= n");
    return dim - gamma;
}

} // namespace

RealField riesz_inverse(const RealField& f, double s, ZeroMode zm)
{
    check_exponent(f.grid.dim, s);
    const auto& ctx = spectral_context(f.grid);
    return RealField(f.grid, riesz_apply(ctx, f.values, s, zm));
}

RealField hartree_potential(const ComplexField& u, double gamma, ZeroMode zm)
{
    const double s = hartree_exponent(u.grid.dim, gamma);
    const auto& ctx = spectral_context(u.grid);
    const Eigen::ArrayXd density = u.values.abs2();
    return RealField(u.grid, riesz_apply(ctx, density, s, zm));
}

double hartree_form(const ComplexField& u, double gamma, ZeroMode zm)
{
    return hartree_form(u, u, gamma, zm);
}

double hartree_form(const ComplexField& u, const ComplexField& v, double gamma, ZeroMode zm)
{
    require_same_grid(u.grid, v.grid);
    const RealField pot = hartree_potential(u, gamma, zm);
    return (pot.values * v.values.abs2()).sum() * u.grid.cell_volume();
}

double lp_integral(const ComplexField& u, double r)
{
    if (!(r >= 1.0) || std::isinf(r)) throw InvalidParameter("lp_integral needs finite r >= 1");
    const Eigen::ArrayXd a2 = u.values.abs2();
    double s;
    if (r == 2.0)
        s = a2.sum();
    else if (r == 4.0)
        s = a2.square().sum();
    else
        s = a2.pow(0.5 * r).sum();
    return s * u.grid.cell_volume();
}

double lp_norm(const ComplexField& u, double r)
{
    if (std::isinf(r) && r > 0) return u.values.abs().maxCoeff();
    if (!(r >= 1.0)) throw InvalidParameter("lp_norm needs r >= 1");
    return std::pow(lp_integral(u, r), 1.0 / r);
}

double h1_seminorm(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    Eigen::ArrayXcd hat;
    ctx.forward(u.values, hat);
    const double N = static_cast<double>(u.grid.size());
    // V sum |k|^2 |c_k|^2 with c_k = hat / N^n.
    return std::sqrt((ctx.k_squared() * hat.abs2()).sum() * u.grid.box_volume() / (N * N));
}

ComplexField dealias(const ComplexField& u)
{
    const auto& ctx = spectral_context(u.grid);
    Eigen::ArrayXcd hat;
    ctx.forward(u.values, hat);
    const int N = u.grid.points;
    for (std::int64_t i = 0; i < u.grid.size(); ++i) {
        const auto idx = u.grid.unflatten(i);
        for (int a = 0; a < u.grid.dim; ++a) {
            if (3 * std::abs(u.grid.mode(idx[a])) > N) {
                hat(i) = 0.0;
                break;
            }
        }
    }
    hat /= static_cast<double>(u.grid.size());
    ComplexField out(u.grid);
    ctx.backward(hat, out.values);
    return out;
}

double epstein_zeta(int dim, double s)
{
    if (!(s >= 0.0) || !(s < dim)) throw InvalidExponent("epstein_zeta needs 0 <= s < n");
    if (s == 0.0) return -1.0;
    // Theta-function splitting of the lattice sum (Riemann's method):
    // pi^-a Gamma(a) Z(2a) = -1/a - 1/(n/2 - a)
    //                        + sum' [G(a, pi m^2) + G(n/2 - a, pi m^2)],
    // G(b, x) = x^-b Gamma(b, x). Terms decay like exp(-pi m^2).
    using boost::math::tgamma;
    const double a = 0.5 * s;
    const double b = 0.5 * dim - a;
    const double pi = std::numbers::pi;
    const int R = 6;
    double acc = -1.0 / a - 1.0 / b;
    int m[3] = {0, 0, 0};
    const int lo[3] = {-R, dim > 1 ? -R : 0, dim > 2 ? -R : 0};
    const int hi[3] = {R, dim > 1 ? R : 0, dim > 2 ? R : 0};
    for (m[0] = lo[0]; m[0] <= hi[0]; ++m[0])
        for (m[1] = lo[1]; m[1] <= hi[1]; ++m[1])
            for (m[2] = lo[2]; m[2] <= hi[2]; ++m[2]) {
                const int q = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
                if (q == 0) continue;
                const double x = pi * q;
                acc += std::pow(x, -a) * tgamma(a, x) + std::pow(x, -b) * tgamma(b, x);
            }
    return acc * std::pow(pi, a) / tgamma(a);
}

double riesz_zero_mode(const GridSpec& grid, double s)
{
    return -epstein_zeta(grid.dim, s) * std::pow(grid.length / (2.0 * std::numbers::pi), s);
}

double boundary_mass_fraction(const ComplexField& u)
{
    const Eigen::ArrayXd a2 = u.values.abs2();
    const double total = a2.sum();
    if (total == 0.0) return 0.0;
    return (a2 * spectral_context(u.grid).shell_mask()).sum() / total;
}

double boundary_amplitude_ratio(const ComplexField& u)
{
    const Eigen::ArrayXd a2 = u.values.abs2();
    const double peak = a2.maxCoeff();
    if (peak == 0.0) return 0.0;
    return std::sqrt((a2 * spectral_context(u.grid).shell_mask()).maxCoeff() / peak);
}

} // namespace nls
