#pragma once

#include <Eigen/Core>

#include <array>
#include <limits>
#include <map>
#include <memory>
#include <utility>

#include "nls/grid.hpp"

namespace nls {

/// How the k = 0 mode of the Riesz multiplier |k|^(-s) is treated.
///
///  - drop: the mode is set to zero. The potential is then defined up to a
///    spatial constant, which only rotates the global phase of u.
///  - whole_space: the mode is set to -Z_n(s) (L/2pi)^s, Z_n the Epstein
///    zeta function of Z^n. With this value the lattice sum approximates
///    the R^n integral (2pi)^-n \int |rho^(k)|^2 |k|^-s dk for localized
///    densities, so quadratic forms match their whole-space values up to
///    O((width/L)^(n-s+2)).
enum class ZeroMode { drop, whole_space };

/// Normalized DFT coefficients: u_j = sum_k c_k exp(2 pi i m.j / N), so
/// c_k = N^-n sum_j u_j exp(-2 pi i m.j / N).
///
/// With this normalization Parseval reads sum_j |u_j|^2 h^n = V sum_k |c_k|^2
/// (V = L^n the box volume), and a lattice plane wave has a single
/// coefficient of unit modulus.
struct SpectralCoefficients {
    GridSpec grid;
    Eigen::ArrayXcd values;
};

/// FFTW plans and cached wavenumber tables for one grid. Obtained through
/// spectral_context(); one instance per grid per thread.
class SpectralContext {
public:
    explicit SpectralContext(const GridSpec& grid);
    ~SpectralContext();
    SpectralContext(const SpectralContext&) = delete;
    SpectralContext& operator=(const SpectralContext&) = delete;

    const GridSpec& grid() const { return grid_; }

    /// Unnormalized forward c2c transform.
    void forward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const;
    /// Unnormalized backward c2c transform (caller divides by N^n).
    void backward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const;
    /// Real-to-half-complex forward transform; out has size half_size().
    void forward_real(const Eigen::ArrayXd& in, Eigen::ArrayXcd& out) const;
    /// Half-complex-to-real backward transform (unnormalized). Destroys in.
    void backward_real(Eigen::ArrayXcd& in, Eigen::ArrayXd& out) const;

    std::int64_t half_size() const { return half_size_; }

    /// |k|^2 in full c2c layout.
    const Eigen::ArrayXd& k_squared() const { return k2_; }
    /// |k|^2 in r2c half layout.
    const Eigen::ArrayXd& k_squared_half() const { return k2_half_; }
    /// Component a of k in full layout, Nyquist mode zeroed (odd multiplier).
    const Eigen::ArrayXd& k_component(int axis) const { return k_axis_[axis]; }
    /// |k|^(-s) in half layout with the requested zero-mode policy.
    const Eigen::ArrayXd& riesz_multiplier_half(double s, ZeroMode zm) const;

    /// Box-centered coordinate along one axis at every grid point.
    const Eigen::ArrayXd& coordinate(int axis) const { return x_axis_[axis]; }
    /// |x|^2 at every grid point.
    const Eigen::ArrayXd& radius_squared() const { return r2_; }
    /// 1 on the two outermost layers of the box along any axis, else 0.
    const Eigen::ArrayXd& shell_mask() const { return shell_; }

private:
    GridSpec grid_;
    std::int64_t half_size_ = 0;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    void* plan_r2c_ = nullptr;
    void* plan_c2r_ = nullptr;
    Eigen::ArrayXd k2_;
    Eigen::ArrayXd k2_half_;
    std::array<Eigen::ArrayXd, 3> k_axis_;
    std::array<Eigen::ArrayXd, 3> x_axis_;
    Eigen::ArrayXd r2_;
    Eigen::ArrayXd shell_;
    mutable std::map<std::pair<double, int>, Eigen::ArrayXd> riesz_cache_;
};

const SpectralContext& spectral_context(const GridSpec& grid);

SpectralCoefficients transform_forward(const ComplexField& u);
ComplexField transform_inverse(const SpectralCoefficients& coeffs);

/// Spectral Laplacian: multiplier -|k|^2.
ComplexField apply_laplacian(const ComplexField& u);

/// Spectral gradient; components beyond grid.dim are empty fields.
std::array<ComplexField, 3> gradient(const ComplexField& u);

/// |nabla|^(-s) f for 0 < s < n, multiplier |k|^(-s) with unit constant.
/// Throws InvalidExponent outside that range.
RealField riesz_inverse(const RealField& f, double s, ZeroMode zm = ZeroMode::drop);

/// (|x|^-gamma * |u|^2) realized as |nabla|^-(n-gamma) |u|^2.
///
/// gamma = n is accepted as the endpoint where the multiplier is the
/// identity on nonzero modes (a local |u|^2 potential); gamma > n or
/// gamma <= 0 throws InvalidExponent. With ZeroMode::drop the potential is
/// not guaranteed nonnegative.
RealField hartree_potential(const ComplexField& u, double gamma, ZeroMode zm = ZeroMode::drop);

/// int (|x|^-gamma * |u|^2) |u|^2 dx under the same convention.
double hartree_form(const ComplexField& u, double gamma, ZeroMode zm = ZeroMode::drop);

/// int (K * |u|^2) |v|^2 dx.
double hartree_form(const ComplexField& u, const ComplexField& v, double gamma,
                    ZeroMode zm = ZeroMode::drop);

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Rectangle-rule L^r norm; r = infinity gives max |u|.
double lp_norm(const ComplexField& u, double r);

/// sum |u|^r h^n, the r-th power of lp_norm without the root.
double lp_integral(const ComplexField& u, double r);

/// ||grad u||_{L^2} via spectral Parseval.
double h1_seminorm(const ComplexField& u);

/// 2/3-rule truncation: zeroes every mode with |m| > N/3 on some axis.
ComplexField dealias(const ComplexField& u);

/// Analytic continuation of sum_{m in Z^n, m != 0} |m|^-s for 0 <= s < n.
double epstein_zeta(int dim, double s);

/// Whole-space value of the Riesz multiplier zero mode, -Z_n(s) (L/2pi)^s.
double riesz_zero_mode(const GridSpec& grid, double s);

/// Fraction of total mass carried by the outermost two layers of the box.
double boundary_mass_fraction(const ComplexField& u);

/// max |u| over the same two layers relative to max |u|; 0 for a zero field.
double boundary_amplitude_ratio(const ComplexField& u);

} // namespace nls
