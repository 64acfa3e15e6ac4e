#include "mcfobs/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace mcfobs {

namespace {

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

double polygon_area(const Point* pts, std::size_t n) {
    double a = 0.0;
    for (std::size_t k = 0; k < n; ++k) a += cross(pts[k], pts[(k + 1) % n]);
    return 0.5 * a;
}

double segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

Point segment_nearest(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return a + t * ab;
}

// Marching-squares bookkeeping shared by contour extraction and area.
// Corners are visited counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1);
// edge k joins corner k to corner k+1.
struct CellPairing {
    int count = 0;
    std::array<int, 2> from{};  // edge where the segment starts (inside -> outside)
    std::array<int, 2> to{};    // edge where it ends (outside -> inside)
};

CellPairing pair_crossings(const std::array<bool, 4>& in, bool center_inside) {
    CellPairing out;
    std::array<int, 2> exits{};
    std::array<int, 2> entries{};
    int ne = 0;
    int nn = 0;
    for (int k = 0; k < 4; ++k) {
        const bool a = in[k];
        const bool b = in[(k + 1) % 4];
        if (a == b) continue;
        if (a) exits[ne++] = k;
        else entries[nn++] = k;
    }
    if (ne == 0) return out;
    if (ne == 1) {
        out.count = 1;
        out.from[0] = exits[0];
        out.to[0] = entries[0];
        return out;
    }
    // Saddle: exits and entries alternate around the cell.
    out.count = 2;
    for (int e = 0; e < 2; ++e) {
        const int x = exits[e];
        int best = -1;
        for (int step = 1; step < 4; ++step) {
            const int k = center_inside ? (x + step) % 4 : (x + 4 - step) % 4;
            if (k == entries[0] || k == entries[1]) {
                best = k;
                break;
            }
        }
        out.from[e] = x;
        out.to[e] = best;
    }
    return out;
}

struct EdgeTable {
    int nx;
    int ny;
    int horizontal_count() const { return ny * (nx - 1); }
    int total() const { return horizontal_count() + nx * (ny - 1); }
    int horizontal(int i, int j) const { return j * (nx - 1) + i; }
    int vertical(int i, int j) const { return horizontal_count() + j * nx + i; }
    // Edge k of cell (i,j) in counter-clockwise order.
    int cell_edge(int i, int j, int k) const {
        switch (k) {
            case 0: return horizontal(i, j);
            case 1: return vertical(i + 1, j);
            case 2: return horizontal(i, j + 1);
            default: return vertical(i, j);
        }
    }
};

Point edge_crossing(const ScalarField& f, const EdgeTable& et, int edge, double level) {
    const Grid2& g = f.grid();
    int i0;
    int j0;
    int i1;
    int j1;
    if (edge < et.horizontal_count()) {
        j0 = edge / (et.nx - 1);
        i0 = edge % (et.nx - 1);
        i1 = i0 + 1;
        j1 = j0;
    } else {
        const int e = edge - et.horizontal_count();
        j0 = e / et.nx;
        i0 = e % et.nx;
        i1 = i0;
        j1 = j0 + 1;
    }
    const double a = f(i0, j0);
    const double b = f(i1, j1);
    const double t = (level - a) / (b - a);
    const Point pa = g.point(i0, j0);
    const Point pb = g.point(i1, j1);
    return pa + t * (pb - pa);
}

void push_unique(std::vector<Point>& pts, Point p) {
    if (pts.empty() || pts.back().x != p.x || pts.back().y != p.y) pts.push_back(p);
}

}  // namespace

double Polyline::length() const {
    double l = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) l += norm(points[k] - points[k - 1]);
    return l;
}

std::size_t Contour::vertex_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.points.size();
    return n;
}

double Contour::length() const {
    double l = 0.0;
    for (const auto& p : polylines) l += p.length();
    return l;
}

Contour extract_contour(const ScalarField& field, double level) {
    const Grid2& g = field.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    bool any_in = false;
    bool any_out = false;
    bool all_equal = true;
    for (std::size_t k = 0; k < field.size(); ++k) {
        const double v = field[k];
        if (v < level) any_in = true;
        else any_out = true;
        if (v != level) all_equal = false;
    }
    if (all_equal) throw AmbiguousContour();
    Contour out;
    if (!any_in || !any_out) return out;

    const EdgeTable et{nx, ny};
    std::vector<int> next(static_cast<std::size_t>(et.total()), -1);
    std::vector<unsigned char> has_incoming(static_cast<std::size_t>(et.total()), 0);
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const std::array<double, 4> c{field(i, j), field(i + 1, j), field(i + 1, j + 1), field(i, j + 1)};
            const std::array<bool, 4> in{c[0] < level, c[1] < level, c[2] < level, c[3] < level};
            if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3]) continue;
            const double center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
            const CellPairing pr = pair_crossings(in, center < level);
            for (int s = 0; s < pr.count; ++s) {
                const int a = et.cell_edge(i, j, pr.from[s]);
                const int b = et.cell_edge(i, j, pr.to[s]);
                next[static_cast<std::size_t>(a)] = b;
                has_incoming[static_cast<std::size_t>(b)] = 1;
            }
        }
    }

    std::vector<Point> cache(static_cast<std::size_t>(et.total()));
    std::vector<unsigned char> cached(static_cast<std::size_t>(et.total()), 0);
    auto vertex = [&](int e) {
        const auto k = static_cast<std::size_t>(e);
        if (!cached[k]) {
            cache[k] = edge_crossing(field, et, e, level);
            cached[k] = 1;
        }
        return cache[k];
    };

    std::vector<unsigned char> used(static_cast<std::size_t>(et.total()), 0);
    auto trace = [&](int start, bool closed) {
        Polyline pl;
        pl.closed = closed;
        int e = start;
        while (e >= 0 && !used[static_cast<std::size_t>(e)]) {
            used[static_cast<std::size_t>(e)] = 1;
            push_unique(pl.points, vertex(e));
            e = next[static_cast<std::size_t>(e)];
        }
        if (closed) {
            // Drop trailing duplicates of the start, then close explicitly.
            while (pl.points.size() > 1 && pl.points.back().x == pl.points.front().x &&
                   pl.points.back().y == pl.points.front().y) {
                pl.points.pop_back();
            }
            if (pl.points.size() >= 3) {
                pl.points.push_back(pl.points.front());
                out.polylines.push_back(std::move(pl));
            }
        } else {
            if (e >= 0) push_unique(pl.points, vertex(e));
            if (pl.points.size() >= 2) out.polylines.push_back(std::move(pl));
        }
    };

    for (int e = 0; e < et.total(); ++e) {
        if (next[static_cast<std::size_t>(e)] >= 0 && !has_incoming[static_cast<std::size_t>(e)]) trace(e, false);
    }
    for (int e = 0; e < et.total(); ++e) {
        if (next[static_cast<std::size_t>(e)] >= 0 && !used[static_cast<std::size_t>(e)]) trace(e, true);
    }
    return out;
}

double area_sublevel(const ScalarField& field, double level) {
    const Grid2& g = field.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double s = g.spacing();
    // Extended lattice: one extra line half a cell outside each side.
    const int ex = nx + 2;
    const int ey = ny + 2;
    std::vector<double> xs(static_cast<std::size_t>(ex));
    std::vector<double> ys(static_cast<std::size_t>(ey));
    for (int i = 0; i < ex; ++i) {
        if (i == 0) xs[0] = g.origin().x - 0.5 * s;
        else if (i == ex - 1) xs[static_cast<std::size_t>(i)] = g.origin().x + (nx - 0.5) * s;
        else xs[static_cast<std::size_t>(i)] = g.origin().x + (i - 1) * s;
    }
    for (int j = 0; j < ey; ++j) {
        if (j == 0) ys[0] = g.origin().y - 0.5 * s;
        else if (j == ey - 1) ys[static_cast<std::size_t>(j)] = g.origin().y + (ny - 0.5) * s;
        else ys[static_cast<std::size_t>(j)] = g.origin().y + (j - 1) * s;
    }
    auto ext_x = [&](int j, int i) {  // j is a sample row, i an extended column
        if (i == 0) return 1.5 * field(0, j) - 0.5 * field(1, j);
        if (i == ex - 1) return 1.5 * field(nx - 1, j) - 0.5 * field(nx - 2, j);
        return field(i - 1, j);
    };
    std::vector<double> ev(static_cast<std::size_t>(ex) * static_cast<std::size_t>(ey));
    auto at = [&](int i, int j) -> double& { return ev[static_cast<std::size_t>(j) * ex + i]; };
    for (int i = 0; i < ex; ++i) {
        for (int j = 1; j < ey - 1; ++j) at(i, j) = ext_x(j - 1, i);
        at(i, 0) = 1.5 * ext_x(0, i) - 0.5 * ext_x(1, i);
        at(i, ey - 1) = 1.5 * ext_x(ny - 1, i) - 0.5 * ext_x(ny - 2, i);
    }

    // Row sums accumulated in a fixed order.
    double total = 0.0;
    for (int j = 0; j + 1 < ey; ++j) {
        double row = 0.0;
        for (int i = 0; i + 1 < ex; ++i) {
            const std::array<Point, 4> p{Point{xs[i], ys[j]}, Point{xs[i + 1], ys[j]},
                                         Point{xs[i + 1], ys[j + 1]}, Point{xs[i], ys[j + 1]}};
            const std::array<double, 4> c{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            const std::array<bool, 4> in{c[0] < level, c[1] < level, c[2] < level, c[3] < level};
            const int nin = in[0] + in[1] + in[2] + in[3];
            const double cell = (p[1].x - p[0].x) * (p[3].y - p[0].y);
            if (nin == 4) {
                row += cell;
                continue;
            }
            if (nin == 0) continue;
            auto crossing = [&](int k) {
                const int a = k;
                const int b = (k + 1) % 4;
                const double t = (level - c[a]) / (c[b] - c[a]);
                return p[a] + t * (p[b] - p[a]);
            };
            const bool saddle = nin == 2 && in[0] == in[2];
            const double center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
            if (saddle && !(center < level)) {
                // Two isolated inside corners.
                for (int k = 0; k < 4; ++k) {
                    if (!in[k]) continue;
                    const std::array<Point, 3> tri{p[k], crossing(k), crossing((k + 3) % 4)};
                    row += std::abs(polygon_area(tri.data(), 3));
                }
                continue;
            }
            std::array<Point, 8> poly{};
            std::size_t n = 0;
            for (int k = 0; k < 4; ++k) {
                if (in[k]) poly[n++] = p[k];
                if (in[k] != in[(k + 1) % 4]) poly[n++] = crossing(k);
            }
            row += polygon_area(poly.data(), n);
        }
        total += row;
    }
    return std::clamp(total, 0.0, g.total_area());
}

double perimeter_sublevel(const ScalarField& field, double level) {
    return extract_contour(field, level).length();
}

double tv_perimeter(const ScalarField& field, double level) {
    const Grid2& g = field.grid();
    const double s = g.spacing();
    double total = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        double row = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double c = field(i, j) < level ? 1.0 : 0.0;
            const double dx = i + 1 < g.nx() ? (field(i + 1, j) < level ? 1.0 : 0.0) - c : 0.0;
            const double dy = j + 1 < g.ny() ? (field(i, j + 1) < level ? 1.0 : 0.0) - c : 0.0;
            row += std::sqrt(dx * dx + dy * dy);
        }
        total += row;
    }
    return total * s;
}

double CurvatureSamples::mean() const {
    if (kappa.empty()) return 0.0;
    return std::accumulate(kappa.begin(), kappa.end(), 0.0) / static_cast<double>(kappa.size());
}

double node_curvature(const ScalarField& f, int i, int j) {
    const Grid2& g = f.grid();
    if (i < 1 || j < 1 || i > g.nx() - 2 || j > g.ny() - 2) return std::numeric_limits<double>::quiet_NaN();
    const double s = g.spacing();
    const double c = f(i, j);
    const double fx = (f(i + 1, j) - f(i - 1, j)) / (2 * s);
    const double fy = (f(i, j + 1) - f(i, j - 1)) / (2 * s);
    const double fxx = (f(i + 1, j) - 2 * c + f(i - 1, j)) / (s * s);
    const double fyy = (f(i, j + 1) - 2 * c + f(i, j - 1)) / (s * s);
    const double fxy = (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4 * s * s);
    const double g2 = fx * fx + fy * fy;
    if (!(g2 > 1e-24)) return std::numeric_limits<double>::quiet_NaN();
    return (fxx * fy * fy - 2 * fx * fy * fxy + fyy * fx * fx) / (g2 * std::sqrt(g2));
}

CurvatureSamples curvature_on_contour(const ScalarField& field, const Contour& contour) {
    const Grid2& g = field.grid();
    const double s = g.spacing();
    const Point lo = g.sample_min();
    const Point hi = g.sample_max();
    CurvatureSamples out;
    for (const auto& pl : contour.polylines) {
        const std::size_t n = pl.closed ? pl.points.size() - 1 : pl.points.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Point p = pl.points[k];
            const double margin = std::min({p.x - lo.x, hi.x - p.x, p.y - lo.y, hi.y - p.y});
            if (margin < 2 * s) {
                ++out.skipped_boundary;
                continue;
            }
            const double fx = (p.x - lo.x) / s;
            const double fy = (p.y - lo.y) / s;
            const int i = std::min(static_cast<int>(fx), g.nx() - 2);
            const int j = std::min(static_cast<int>(fy), g.ny() - 2);
            const double a = fx - i;
            const double b = fy - j;
            const double k00 = node_curvature(field, i, j);
            const double k10 = node_curvature(field, i + 1, j);
            const double k01 = node_curvature(field, i, j + 1);
            const double k11 = node_curvature(field, i + 1, j + 1);
            if (std::isnan(k00) || std::isnan(k10) || std::isnan(k01) || std::isnan(k11)) {
                ++out.skipped_gradient;
                continue;
            }
            out.points.push_back(p);
            out.kappa.push_back((1 - a) * (1 - b) * k00 + a * (1 - b) * k10 + (1 - a) * b * k01 + a * b * k11);
        }
    }
    return out;
}

SegmentIndex::SegmentIndex(const Contour& c) {
    double minx = std::numeric_limits<double>::infinity();
    double miny = minx;
    double maxx = -minx;
    double maxy = -minx;
    double total = 0.0;
    for (std::size_t p = 0; p < c.polylines.size(); ++p) {
        const auto& pts = c.polylines[p].points;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            minx = std::min(minx, pts[k].x);
            maxx = std::max(maxx, pts[k].x);
            miny = std::min(miny, pts[k].y);
            maxy = std::max(maxy, pts[k].y);
            if (k + 1 < pts.size()) {
                segments_.push_back({pts[k], pts[k + 1], static_cast<int>(p)});
                total += norm(pts[k + 1] - pts[k]);
            }
        }
        if (pts.size() == 1) segments_.push_back({pts[0], pts[0], static_cast<int>(p)});
    }
    if (segments_.empty()) return;
    const double avg = std::max(total / static_cast<double>(segments_.size()), 1e-12);
    const double extent = std::max({maxx - minx, maxy - miny, avg});
    cell_ = std::max(2.0 * avg, extent / 256.0);
    lo_ = {minx, miny};
    nbx_ = std::max(1, static_cast<int>(std::ceil((maxx - minx) / cell_)) + 1);
    nby_ = std::max(1, static_cast<int>(std::ceil((maxy - miny) / cell_)) + 1);
    buckets_.assign(static_cast<std::size_t>(nbx_) * static_cast<std::size_t>(nby_), {});
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& sg = segments_[k];
        int bx0;
        int by0;
        int bx1;
        int by1;
        bucket_range(bx0, by0, {std::min(sg.a.x, sg.b.x), std::min(sg.a.y, sg.b.y)});
        bucket_range(bx1, by1, {std::max(sg.a.x, sg.b.x), std::max(sg.a.y, sg.b.y)});
        for (int by = by0; by <= by1; ++by) {
            for (int bx = bx0; bx <= bx1; ++bx) {
                buckets_[static_cast<std::size_t>(by) * nbx_ + bx].push_back(static_cast<int>(k));
            }
        }
    }
}

void SegmentIndex::bucket_range(int& bx, int& by, Point p) const {
    bx = std::clamp(static_cast<int>(std::floor((p.x - lo_.x) / cell_)), 0, nbx_ - 1);
    by = std::clamp(static_cast<int>(std::floor((p.y - lo_.y) / cell_)), 0, nby_ - 1);
}

template <class Visit>
void SegmentIndex::search(Point p, Visit&& visit) const {
    int cx;
    int cy;
    bucket_range(cx, cy, p);
    double best = std::numeric_limits<double>::infinity();
    const int rmax = std::max(nbx_, nby_);
    for (int r = 0; r <= rmax; ++r) {
        if ((r - 1) * cell_ > best) break;
        for (int by = cy - r; by <= cy + r; ++by) {
            if (by < 0 || by >= nby_) continue;
            const bool edge_row = by == cy - r || by == cy + r;
            for (int bx = cx - r; bx <= cx + r; bx += (edge_row ? 1 : 2 * r)) {
                if (bx >= 0 && bx < nbx_) {
                    for (int k : buckets_[static_cast<std::size_t>(by) * nbx_ + bx]) {
                        best = std::min(best, visit(segments_[static_cast<std::size_t>(k)]));
                    }
                }
                if (r == 0) break;
            }
        }
    }
}

double SegmentIndex::distance(Point p) const {
    if (segments_.empty()) throw UndefinedDistance();
    double best = std::numeric_limits<double>::infinity();
    search(p, [&](const Segment& s) {
        best = std::min(best, segment_distance(p, s.a, s.b));
        return best;
    });
    return best;
}

Point SegmentIndex::nearest(Point p, int* polyline) const {
    if (segments_.empty()) throw UndefinedDistance();
    double best = std::numeric_limits<double>::infinity();
    Point arg{};
    int which = -1;
    search(p, [&](const Segment& s) {
        const Point q = segment_nearest(p, s.a, s.b);
        const double d = norm(p - q);
        if (d < best) {
            best = d;
            arg = q;
            which = s.polyline;
        }
        return best;
    });
    if (polyline) *polyline = which;
    return arg;
}

std::size_t SegmentIndex::nearest_segment(Point p, double* dist) const {
    if (segments_.empty()) throw UndefinedDistance();
    double best = std::numeric_limits<double>::infinity();
    std::size_t which = 0;
    search(p, [&](const Segment& s) {
        const double d = segment_distance(p, s.a, s.b);
        if (d < best) {
            best = d;
            which = static_cast<std::size_t>(&s - segments_.data());
        }
        return best;
    });
    if (dist) *dist = best;
    return which;
}

double SegmentIndex::distance_to_segment(std::size_t id, Point p) const {
    const Segment& s = segments_.at(id);
    return segment_distance(p, s.a, s.b);
}

double distance_to_contour(Point p, const Contour& c) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& pl : c.polylines) {
        for (std::size_t k = 0; k + 1 < pl.points.size(); ++k) {
            best = std::min(best, segment_distance(p, pl.points[k], pl.points[k + 1]));
            any = true;
        }
        if (pl.points.size() == 1) {
            best = std::min(best, norm(p - pl.points[0]));
            any = true;
        }
    }
    if (!any) throw UndefinedDistance();
    return best;
}

namespace {

// Directed Hausdorff distance sup_{p in a} dist(p, b). Pieces of `a` are
// bisected while an upper bound can still beat the running maximum. Distance
// to a single segment is convex along a straight piece, so the larger of the
// endpoint distances to either endpoint's nearest segment bounds the piece.
double directed_hausdorff(const Contour& a, const SegmentIndex& b, double tol) {
    struct Node {
        Point p;
        double d;
        std::size_t seg;
    };
    auto node = [&](Point p) {
        Node n{p, 0.0, 0};
        n.seg = b.nearest_segment(p, &n.d);
        return n;
    };
    double best = 0.0;
    std::vector<std::pair<Node, Node>> stack;
    for (const auto& pl : a.polylines) {
        if (pl.points.size() == 1) best = std::max(best, b.distance(pl.points[0]));
        for (std::size_t k = 0; k + 1 < pl.points.size(); ++k) {
            stack.emplace_back(node(pl.points[k]), node(pl.points[k + 1]));
            while (!stack.empty()) {
                const auto [p, q] = stack.back();
                stack.pop_back();
                best = std::max({best, p.d, q.d});
                const double via_p = std::max(p.d, b.distance_to_segment(p.seg, q.p));
                const double via_q = std::max(q.d, b.distance_to_segment(q.seg, p.p));
                if (std::min(via_p, via_q) <= best + tol) continue;
                const Node m = node(0.5 * (p.p + q.p));
                stack.emplace_back(p, m);
                stack.emplace_back(m, q);
            }
        }
    }
    return best;
}

}  // namespace

double hausdorff(const Contour& a, const Contour& b) {
    if (a.vertex_count() == 0 || b.vertex_count() == 0) throw UndefinedDistance();
    const SegmentIndex ia(a);
    const SegmentIndex ib(b);
    double extent = 0.0;
    for (const auto* c : {&a, &b}) {
        for (const auto& pl : c->polylines) {
            for (const auto& p : pl.points) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
        }
    }
    const double tol = 1e-10 * std::max(extent, 1.0);
    return std::max(directed_hausdorff(a, ib, tol), directed_hausdorff(b, ia, tol));
}

double symmetric_difference_area(const RegionMask& a, const RegionMask& b) {
    require_same_grid(a.grid(), b.grid());
    const auto ca = a.cells();
    const auto cb = b.cells();
    std::size_t n = 0;
    for (std::size_t k = 0; k < ca.size(); ++k) n += (ca[k] != cb[k]) ? 1U : 0U;
    return static_cast<double>(n) * a.grid().cell_area();
}

double mean_radius(const Contour& c, Point center) {
    double wsum = 0.0;
    double rsum = 0.0;
    for (const auto& pl : c.polylines) {
        const auto& pts = pl.points;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double len = norm(pts[k + 1] - pts[k]);
            rsum += 0.5 * len * (norm(pts[k] - center) + norm(pts[k + 1] - center));
            wsum += len;
        }
    }
    if (wsum == 0.0) throw UndefinedDistance();
    return rsum / wsum;
}

}  // namespace mcfobs
