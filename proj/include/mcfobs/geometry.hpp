#pragma once

#include <cstddef>
#include <vector>

#include "mcfobs/grid.hpp"

namespace mcfobs {

struct Polyline {
    std::vector<Point> points;
    bool closed = false;

    double length() const;
};

/// Level-line representation. Inside ({field < level}) lies to the left of
/// every polyline; closed polylines repeat their first point at the end.
struct Contour {
    std::vector<Polyline> polylines;

    bool empty() const { return polylines.empty(); }
    std::size_t vertex_count() const;
    double length() const;
};

/// Marching squares on the samples. Saddle cells are resolved by the sign of
/// the cell-center average. Throws AmbiguousContour when every sample equals
/// `level`.
Contour extract_contour(const ScalarField& field, double level = 0.0);

/// Area of {field < level} over the cells of the grid. The linear interpolant
/// is clipped exactly per cell; the half-cell border strip uses linear
/// extrapolation from the outermost samples.
double area_sublevel(const ScalarField& field, double level = 0.0);

/// Length of extract_contour(field, level).
double perimeter_sublevel(const ScalarField& field, double level = 0.0);

/// Discrete total variation of the indicator of {field < level} with
/// forward differences and Neumann boundary (the perimeter the TV solver
/// actually sees).
double tv_perimeter(const ScalarField& field, double level = 0.0);

struct CurvatureSamples {
    std::vector<Point> points;
    std::vector<double> kappa;
    std::size_t skipped_boundary = 0;
    std::size_t skipped_gradient = 0;

    bool empty() const { return kappa.empty(); }
    double mean() const;
};

/// Curvature div(grad u / |grad u|) interpolated at contour vertices, positive
/// on convex boundaries of {field < level}. Vertices closer than two cells to
/// the sample hull are skipped.
CurvatureSamples curvature_on_contour(const ScalarField& field, const Contour& contour);

/// Curvature at one sample from central differences; NaN where the gradient
/// vanishes or the stencil leaves the grid.
double node_curvature(const ScalarField& field, int i, int j);

/// Symmetric Hausdorff distance between the point sets of two contours.
/// Throws UndefinedDistance when either contour is empty.
double hausdorff(const Contour& a, const Contour& b);

/// Distance from p to the nearest point of a contour (brute force).
double distance_to_contour(Point p, const Contour& c);

/// Area of the cellwise symmetric difference. Throws GridMismatch.
double symmetric_difference_area(const RegionMask& a, const RegionMask& b);

/// Length-weighted mean distance of contour vertices from `center`.
double mean_radius(const Contour& c, Point center);

/// Fast nearest-segment queries against a fixed contour.
class SegmentIndex {
public:
    explicit SegmentIndex(const Contour& c);

    bool empty() const { return segments_.empty(); }
    double distance(Point p) const;
    /// Nearest point on the contour and its polyline id.
    Point nearest(Point p, int* polyline = nullptr) const;
    /// Id of the nearest segment and the distance to it.
    std::size_t nearest_segment(Point p, double* dist) const;
    double distance_to_segment(std::size_t id, Point p) const;

private:
    struct Segment {
        Point a;
        Point b;
        int polyline;
    };
    void bucket_range(int& bx, int& by, Point p) const;
    template <class Visit>
    void search(Point p, Visit&& visit) const;

    std::vector<Segment> segments_;
    Point lo_{};
    double cell_ = 1.0;
    int nbx_ = 1;
    int nby_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace mcfobs
