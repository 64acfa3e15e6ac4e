#include "mcfobs/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcfobs/geometry.hpp"

namespace mcfobs {

namespace {

constexpr int kExactBand = 4;      // cells around the front with exact polyline distances
constexpr double kUnitSlack = 0.25;  // |grad| this close to 1 counts as already a distance
constexpr double kInf = std::numeric_limits<double>::infinity();

double godunov(double a, double b, double s) {
    if (a > b) std::swap(a, b);
    if (a == kInf) return kInf;
    if (b - a >= s) return a + s;
    return 0.5 * (a + b + std::sqrt(2.0 * s * s - (a - b) * (a - b)));
}

// Fills the non-frozen entries of `mag` by Gauss-Seidel sweeps in the four
// diagonal orderings until nothing changes.
void fast_sweep(const Grid2& g, std::vector<double>& mag, const std::vector<unsigned char>& frozen) {
    const int nx = g.nx();
    const int ny = g.ny();
    const double s = g.spacing();
    auto update = [&](int i, int j) {
        const std::size_t k = g.index(i, j);
        if (frozen[k]) return false;
        const double a = std::min(i > 0 ? mag[k - 1] : kInf, i + 1 < nx ? mag[k + 1] : kInf);
        const double b = std::min(j > 0 ? mag[k - static_cast<std::size_t>(nx)] : kInf,
                                  j + 1 < ny ? mag[k + static_cast<std::size_t>(nx)] : kInf);
        const double v = godunov(a, b, s);
        if (v < mag[k]) {
            mag[k] = v;
            return true;
        }
        return false;
    };
    for (int round = 0; round < 64; ++round) {
        bool changed = false;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) changed |= update(i, j);
        }
        for (int j = 0; j < ny; ++j) {
            for (int i = nx - 1; i >= 0; --i) changed |= update(i, j);
        }
        for (int j = ny - 1; j >= 0; --j) {
            for (int i = nx - 1; i >= 0; --i) changed |= update(i, j);
        }
        for (int j = ny - 1; j >= 0; --j) {
            for (int i = 0; i < nx; ++i) changed |= update(i, j);
        }
        if (!changed) break;
    }
}

double gradient_norm(const ScalarField& f, int i, int j) {
    const Grid2& g = f.grid();
    const double s = g.spacing();
    auto diff = [&](int im, int jm, int ip, int jp, double w) { return (f(ip, jp) - f(im, jm)) / (w * s); };
    double gx;
    double gy;
    if (i == 0) gx = diff(0, j, 1, j, 1);
    else if (i == g.nx() - 1) gx = diff(i - 1, j, i, j, 1);
    else gx = diff(i - 1, j, i + 1, j, 2);
    if (j == 0) gy = diff(i, 0, i, 1, 1);
    else if (j == g.ny() - 1) gy = diff(i, j - 1, i, j, 1);
    else gy = diff(i, j - 1, i, j + 1, 2);
    return std::hypot(gx, gy);
}

// Shared by signed_distance and redistance. `phi` carries the sign and the
// front; keep_front selects whether front samples retain phi's values.
ScalarField distance_from_front(const ScalarField& phi, bool keep_front, double cap) {
    const Grid2& g = phi.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double s = g.spacing();
    const Contour front = extract_contour(phi, 0.0);
    const SegmentIndex index(front);

    std::vector<unsigned char> is_front(g.size(), 0);
    std::vector<unsigned char> frozen(g.size(), 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool in = phi(i, j) < 0.0;
            const bool flip = (i > 0 && (phi(i - 1, j) < 0.0) != in) || (i + 1 < nx && (phi(i + 1, j) < 0.0) != in) ||
                              (j > 0 && (phi(i, j - 1) < 0.0) != in) || (j + 1 < ny && (phi(i, j + 1) < 0.0) != in);
            if (!flip) continue;
            is_front[g.index(i, j)] = 1;
            for (int b = std::max(0, j - kExactBand); b <= std::min(ny - 1, j + kExactBand); ++b) {
                for (int a = std::max(0, i - kExactBand); a <= std::min(nx - 1, i + kExactBand); ++a) {
                    frozen[g.index(a, b)] = 1;
                }
            }
        }
    }

    std::vector<double> mag(g.size(), kInf);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (!frozen[k]) continue;
            double m = index.distance(g.point(i, j));
            if (keep_front && is_front[k]) {
                const double grad = gradient_norm(phi, i, j);
                if (std::abs(grad - 1.0) <= kUnitSlack) {
                    m = std::abs(phi[k]);
                } else if (grad > 1e-12) {
                    m = std::abs(phi[k]) / grad;
                    // Never farther than the crossing on any sign-changing edge.
                    const bool in = phi[k] < 0.0;
                    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
                    for (const auto& q : nb) {
                        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
                        const double other = phi(q[0], q[1]);
                        if ((other < 0.0) == in) continue;
                        const double theta = std::abs(phi[k]) / (std::abs(phi[k]) + std::abs(other));
                        m = std::min(m, theta * s);
                    }
                }
            }
            mag[k] = m;
        }
    }
    fast_sweep(g, mag, frozen);

    ScalarField out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double m = std::min(mag[k], cap);
        if (phi[k] < 0.0) out[k] = m > 0.0 ? -m : -std::numeric_limits<double>::denorm_min();
        else out[k] = m;
    }
    return out;
}

// 1D squared distance transform of a sampled function (lower envelope of
// parabolas), in place.
void edt_1d(std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == kInf) continue;
        while (k >= 0) {
            const int p = v[static_cast<std::size_t>(k)];
            const double sct = ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
                                (f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
                               (2.0 * (q - p));
            if (sct <= z[static_cast<std::size_t>(k)]) {
                --k;
            } else {
                ++k;
                v[static_cast<std::size_t>(k)] = q;
                z[static_cast<std::size_t>(k)] = sct;
                z[static_cast<std::size_t>(k) + 1] = kInf;
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        }
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
        const int p = v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(q)] = static_cast<double>(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
}

}  // namespace

double DistanceCap::resolve(const Grid2& g) const {
    if (value < 0.0 || !std::isfinite(value)) throw InvalidArgument("distance cap must be nonnegative and finite");
    return value > 0.0 ? value : g.diameter();
}

ScalarField signed_distance(const RegionMask& mask, DistanceCap cap) {
    const Grid2& g = mask.grid();
    const double c = cap.resolve(g);
    const std::size_t n = mask.count();
    if (n == 0) return ScalarField(g, c);
    if (n == g.size()) return ScalarField(g, -c);
    ScalarField phi(g);
    for (std::size_t k = 0; k < g.size(); ++k) phi[k] = mask[k] ? -0.5 * g.spacing() : 0.5 * g.spacing();
    return distance_from_front(phi, false, c);
}

ScalarField redistance(const ScalarField& field, DistanceCap cap) {
    if (!field.all_finite()) throw InvalidArgument("redistance: field has non-finite values");
    const double c = cap.resolve(field.grid());
    bool any_in = false;
    bool any_out = false;
    for (std::size_t k = 0; k < field.size(); ++k) {
        if (field[k] < 0.0) any_in = true;
        else any_out = true;
    }
    if (!any_in || !any_out) throw VanishedSet();
    return distance_from_front(field, true, c);
}

std::vector<double> squared_distance_transform(const RegionMask& source) {
    const Grid2& g = source.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const int m = std::max(nx, ny);
    std::vector<double> d(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) d[k] = source[k] ? 0.0 : kInf;
    std::vector<double> f(static_cast<std::size_t>(m));
    std::vector<double> out(static_cast<std::size_t>(m));
    std::vector<int> v(static_cast<std::size_t>(m));
    std::vector<double> z(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i < nx; ++i) {
        f.resize(static_cast<std::size_t>(ny));
        out.resize(static_cast<std::size_t>(ny));
        for (int j = 0; j < ny; ++j) f[static_cast<std::size_t>(j)] = d[g.index(i, j)];
        edt_1d(f, out, v, z);
        for (int j = 0; j < ny; ++j) d[g.index(i, j)] = out[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < ny; ++j) {
        f.resize(static_cast<std::size_t>(nx));
        out.resize(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i) f[static_cast<std::size_t>(i)] = d[g.index(i, j)];
        edt_1d(f, out, v, z);
        for (int i = 0; i < nx; ++i) d[g.index(i, j)] = out[static_cast<std::size_t>(i)];
    }
    return d;
}

RegionMask open_with_balls(const RegionMask& mask, double rho) {
    const Grid2& g = mask.grid();
    if (!(rho >= g.spacing() * (1.0 - 1e-12))) throw InvalidArgument("open_with_balls: rho must be at least one cell");
    const double r2 = (rho / g.spacing()) * (rho / g.spacing()) * (1.0 + 1e-12);
    RegionMask outside(g);
    for (std::size_t k = 0; k < g.size(); ++k) outside.set(k, !mask[k]);
    const auto to_outside = squared_distance_transform(outside);
    RegionMask eroded(g);
    for (std::size_t k = 0; k < g.size(); ++k) eroded.set(k, to_outside[k] > r2);
    const auto to_eroded = squared_distance_transform(eroded);
    RegionMask opened(g);
    for (std::size_t k = 0; k < g.size(); ++k) opened.set(k, to_eroded[k] <= r2);
    return opened;
}

}  // namespace mcfobs
