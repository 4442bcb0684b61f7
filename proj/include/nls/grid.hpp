#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <string>

#include "nls/errors.hpp"

namespace nls {

using cplx = std::complex<double>;

/// Periodic box [-L/2, L/2)^n sampled with N points per axis.
///
/// Points are x_j = -L/2 + j*h, h = L/N, stored row-major with axis 0
/// slowest. Wavenumbers follow the DFT ordering 2*pi*m/L with
/// m = 0, 1, ..., N/2-1, -N/2, ..., -1; the -N/2 mode is the unpaired one.
struct GridSpec {
    int dim = 1;
    int points = 0;
    double length = 0.0;

    double spacing() const { return length / points; }
    double cell_volume() const;
    double box_volume() const;
    std::int64_t size() const;

    /// Coordinate of sample j along any axis.
    double coordinate(int j) const { return -0.5 * length + j * spacing(); }
    /// Wavenumber of DFT index j along any axis.
    double wavenumber(int j) const;
    /// Signed mode number m of DFT index j.
    int mode(int j) const { return j < points / 2 ? j : j - points; }

    /// Per-axis indices of a flat row-major index.
    std::array<int, 3> unflatten(std::int64_t flat) const;

    /// Stable string identifying the discretization (used in cache keys).
    std::string fingerprint() const;

    friend bool operator==(const GridSpec& a, const GridSpec& b) = default;
};

/// Validates and builds a grid. Throws InvalidGrid unless 1 <= dim <= 3,
/// points is even and >= 4, and length > 0.
GridSpec make_grid(int dim, int points, double length);

/// Complex samples on a grid; the state u(t, .).
struct ComplexField {
    GridSpec grid;
    Eigen::ArrayXcd values;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : grid(g), values(Eigen::ArrayXcd::Zero(g.size())) {}
    ComplexField(const GridSpec& g, Eigen::ArrayXcd v);

    bool all_finite() const;
};

/// Real samples on a grid (densities, potentials).
struct RealField {
    GridSpec grid;
    Eigen::ArrayXd values;

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
    RealField(const GridSpec& g, Eigen::ArrayXd v);

    bool all_finite() const;
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// |x|^2 at every grid point, box-centered coordinates.
Eigen::ArrayXd radius_squared(const GridSpec& grid);

/// Samples f(x) at every grid point. f receives a std::array<double, 3> with
/// unused trailing components set to zero.
template <typename F>
ComplexField sample(const GridSpec& grid, F&& f)
{
    ComplexField out(grid);
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < grid.dim; ++a) x[a] = grid.coordinate(idx[a]);
        out.values(i) = cplx(f(x));
    }
    return out;
}

} // namespace nls
