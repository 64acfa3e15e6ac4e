#include "mcfobs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcfobs {

double norm(Point p) { return std::hypot(p.x, p.y); }

Grid2::Grid2(int nx, int ny, double spacing, Point origin)
    : nx_(nx), ny_(ny), spacing_(spacing), origin_(origin) {
    if (nx < 4 || ny < 4) throw InvalidArgument("grid needs at least 4x4 cells");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("grid spacing must be positive");
    if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) throw InvalidArgument("grid origin must be finite");
}

Grid2 Grid2::unit_square(int n) {
    const double s = 1.0 / n;
    return Grid2(n, n, s, {0.5 * s, 0.5 * s});
}

Grid2 Grid2::square(double lo, double hi, double spacing) {
    const double cells = (hi - lo) / spacing;
    const int n = static_cast<int>(std::lround(cells));
    if (std::abs(cells - n) > 1e-9 * std::max(1.0, cells)) {
        throw InvalidArgument("square extent is not a whole number of cells");
    }
    return Grid2(n, n, spacing, {lo + 0.5 * spacing, lo + 0.5 * spacing});
}

double Grid2::diameter() const {
    return spacing_ * std::hypot(static_cast<double>(nx_), static_cast<double>(ny_));
}

bool Grid2::operator==(const Grid2& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && spacing_ == o.spacing_ && origin_.x == o.origin_.x &&
           origin_.y == o.origin_.y;
}

void require_same_grid(const Grid2& a, const Grid2& b) {
    if (a != b) {
        throw GridMismatch(std::to_string(a.nx()) + "x" + std::to_string(a.ny()) + " vs " +
                           std::to_string(b.nx()) + "x" + std::to_string(b.ny()));
    }
}

ScalarField::ScalarField(const Grid2& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid2& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field length does not match grid");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::interpolate(Point p) const {
    const double s = grid_.spacing();
    double fx = (p.x - grid_.origin().x) / s;
    double fy = (p.y - grid_.origin().y) / s;
    fx = std::clamp(fx, 0.0, static_cast<double>(grid_.nx() - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(grid_.ny() - 1));
    int i = std::min(static_cast<int>(fx), grid_.nx() - 2);
    int j = std::min(static_cast<int>(fy), grid_.ny() - 2);
    const double a = fx - i;
    const double b = fy - j;
    const double v00 = (*this)(i, j);
    const double v10 = (*this)(i + 1, j);
    const double v01 = (*this)(i, j + 1);
    const double v11 = (*this)(i + 1, j + 1);
    return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

RegionMask::RegionMask(const Grid2& grid, bool fill) : grid_(grid), inside_(grid.size(), fill ? 1 : 0) {}

RegionMask RegionMask::sublevel(const ScalarField& field, double level) {
    RegionMask out(field.grid());
    for (std::size_t k = 0; k < field.size(); ++k) out.inside_[k] = field[k] < level ? 1 : 0;
    return out;
}

std::size_t RegionMask::count() const {
    return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), static_cast<unsigned char>(1)));
}

bool RegionMask::subset_of(const RegionMask& other) const {
    require_same_grid(grid_, other.grid_);
    for (std::size_t k = 0; k < inside_.size(); ++k) {
        if (inside_[k] && !other.inside_[k]) return false;
    }
    return true;
}

bool RegionMask::operator==(const RegionMask& other) const {
    return grid_ == other.grid_ && inside_ == other.inside_;
}

}  // namespace mcfobs
