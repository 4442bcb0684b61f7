#include "nls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nls {

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::box_volume() const { return std::pow(length, dim); }

std::int64_t GridSpec::size() const
{
    std::int64_t s = 1;
    for (int a = 0; a < dim; ++a) s *= points;
    return s;
}

double GridSpec::wavenumber(int j) const { return 2.0 * std::numbers::pi * mode(j) / length; }

std::array<int, 3> GridSpec::unflatten(std::int64_t flat) const
{
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % points);
        flat /= points;
    }
    return idx;
}

std::string GridSpec::fingerprint() const
{
    std::ostringstream os;
    os.precision(17);
    os << "n" << dim << "-N" << points << "-L" << length;
    return os.str();
}

GridSpec make_grid(int dim, int points, double length)
{
    if (dim < 1 || dim > 3)
        throw InvalidGrid("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (points < 4 || points % 2 != 0)
        throw InvalidGrid("points per axis must be even and >= 4, got " + std::to_string(points));
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidGrid("box length must be positive and finite");
    return GridSpec{dim, points, length};
}

ComplexField::ComplexField(const GridSpec& g, Eigen::ArrayXcd v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.size())
        throw ShapeMismatch("field length does not match grid point count");
}

bool ComplexField::all_finite() const { return values.isFinite().all(); }

RealField::RealField(const GridSpec& g, Eigen::ArrayXd v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.size())
        throw ShapeMismatch("field length does not match grid point count");
}

bool RealField::all_finite() const { return values.isFinite().all(); }

void require_same_grid(const GridSpec& a, const GridSpec& b)
{
    if (!(a == b)) throw ShapeMismatch("fields live on different grids");
}

Eigen::ArrayXd radius_squared(const GridSpec& grid)
{
    Eigen::ArrayXd r2(grid.size());
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflatten(i);
        double s = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            const double x = grid.coordinate(idx[a]);
            s += x * x;
        }
        r2(i) = s;
    }
    return r2;
}

} // namespace nls
