#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcfobs/error.hpp"

namespace mcfobs {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double norm(Point p);

/// Uniform 2D grid of nx by ny samples. Sample (i, j) sits at the center of
/// cell (i, j), i.e. at origin + spacing * (i, j).
class Grid2 {
public:
    Grid2(int nx, int ny, double spacing, Point origin);

    /// n x n cells covering [0,1]^2, samples at cell centers.
    static Grid2 unit_square(int n);
    /// Cells covering [lo, hi]^2 with the given spacing (hi - lo must be a
    /// whole number of cells).
    static Grid2 square(double lo, double hi, double spacing);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return spacing_; }
    Point origin() const { return origin_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }
    Point point(int i, int j) const { return {origin_.x + spacing_ * i, origin_.y + spacing_ * j}; }
    Point point(std::size_t k) const {
        return point(static_cast<int>(k % static_cast<std::size_t>(nx_)),
                     static_cast<int>(k / static_cast<std::size_t>(nx_)));
    }

    /// Extent covered by the cells (half a cell beyond the outer samples).
    Point domain_min() const { return {origin_.x - 0.5 * spacing_, origin_.y - 0.5 * spacing_}; }
    Point domain_max() const {
        return {origin_.x + (nx_ - 0.5) * spacing_, origin_.y + (ny_ - 0.5) * spacing_};
    }
    /// Bounding box of the sample points.
    Point sample_min() const { return origin_; }
    Point sample_max() const { return point(nx_ - 1, ny_ - 1); }
    double diameter() const;
    double cell_area() const { return spacing_ * spacing_; }
    double total_area() const { return static_cast<double>(size()) * cell_area(); }

    bool operator==(const Grid2& other) const;
    bool operator!=(const Grid2& other) const { return !(*this == other); }

private:
    int nx_;
    int ny_;
    double spacing_;
    Point origin_;
};

void require_same_grid(const Grid2& a, const Grid2& b);

/// Real-valued samples on a grid, row-major, all finite.
class ScalarField {
public:
    explicit ScalarField(const Grid2& grid, double fill = 0.0);
    ScalarField(const Grid2& grid, std::vector<double> values);

    template <class F>
    static ScalarField sample(const Grid2& grid, F&& fn) {
        ScalarField out(grid);
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) out(i, j) = fn(grid.point(i, j));
        }
        return out;
    }

    const Grid2& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;
    /// Bilinear interpolation, clamped to the sample hull.
    double interpolate(Point p) const;

private:
    Grid2 grid_;
    std::vector<double> values_;
};

/// Per-cell membership.
class RegionMask {
public:
    explicit RegionMask(const Grid2& grid, bool fill = false);

    template <class F>
    static RegionMask sample(const Grid2& grid, F&& pred) {
        RegionMask out(grid);
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) out.set(i, j, pred(grid.point(i, j)));
        }
        return out;
    }
    /// Cells where field < level.
    static RegionMask sublevel(const ScalarField& field, double level = 0.0);

    const Grid2& grid() const { return grid_; }
    std::size_t size() const { return inside_.size(); }
    bool operator()(int i, int j) const { return inside_[grid_.index(i, j)] != 0; }
    bool operator[](std::size_t k) const { return inside_[k] != 0; }
    void set(int i, int j, bool v) { inside_[grid_.index(i, j)] = v ? 1 : 0; }
    void set(std::size_t k, bool v) { inside_[k] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    double area() const { return static_cast<double>(count()) * grid_.cell_area(); }
    /// True when every inside cell of this mask is inside `other`.
    bool subset_of(const RegionMask& other) const;
    bool operator==(const RegionMask& other) const;

    std::span<const unsigned char> cells() const { return inside_; }

private:
    Grid2 grid_;
    std::vector<unsigned char> inside_;
};

}  // namespace mcfobs
