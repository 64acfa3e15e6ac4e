#include "mcfobs/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "mcfobs/distance.hpp"
#include "mcfobs/io.hpp"

namespace mcfobs {

using nlohmann::json;

namespace {

double disk_phi(Point p, Point c, double r) { return norm(p - c) - r; }

// Signed distance to an axis-aligned box given by its half sizes.
double box_phi(Point p, Point c, double hx, double hy) {
    const double dx = std::abs(p.x - c.x) - hx;
    const double dy = std::abs(p.y - c.y) - hy;
    if (dx > 0.0 || dy > 0.0) return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    return std::max(dx, dy);
}

double dumbbell_phi(Point p, const ShapeSpec& s) {
    const Point mid = 0.5 * (s.c1 + s.c2);
    const double half_len = 0.5 * std::abs(s.c2.x - s.c1.x);
    const double neck = box_phi(p, mid, half_len, 0.5 * s.neck_width);
    return std::min({disk_phi(p, s.c1, s.radius), disk_phi(p, s.c2, s.radius), neck});
}

template <class T>
T field(const json& obj, const char* key, const T& fallback, const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument("config field '" + where + "." + key + "' has the wrong type");
    }
}

Point point_field(const json& obj, const char* key, Point fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto v = field<std::vector<double>>(obj, key, {}, where);
    if (v.size() != 2) throw InvalidArgument("config field '" + where + "." + key + "' must be [x, y]");
    return {v[0], v[1]};
}

ShapeSpec shape_from_json(const json& j, ShapeSpec s, const std::string& where, const std::filesystem::path& base) {
    if (!j.is_object()) throw InvalidArgument("config field '" + where + "' must be an object");
    s.kind = field<std::string>(j, "kind", s.kind, where);
    s.center = point_field(j, "center", s.center, where);
    s.radius = field<double>(j, "radius", s.radius, where);
    s.half_width = field<double>(j, "half_width", s.half_width, where);
    s.c1 = point_field(j, "c1", s.c1, where);
    s.c2 = point_field(j, "c2", s.c2, where);
    s.neck_width = field<double>(j, "neck_width", s.neck_width, where);
    s.lo = point_field(j, "lo", s.lo, where);
    s.hi = point_field(j, "hi", s.hi, where);
    s.rho = field<double>(j, "rho", s.rho, where);
    s.path = field<std::string>(j, "path", s.path, where);
    if (!s.path.empty() && std::filesystem::path(s.path).is_relative() && !base.empty()) s.path = (base / s.path).string();
    const std::vector<std::string> kinds =
        where == "initial" ? std::vector<std::string>{"disk", "strip", "two_disks", "dumbbell", "from_pgm"}
                           : std::vector<std::string>{"none", "box", "disk", "dilate_initial", "equals_initial", "from_pgm"};
    if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
        throw InvalidArgument("config field '" + where + ".kind' has unknown value '" + s.kind + "'");
    }
    return s;
}

json shape_to_json(const ShapeSpec& s) {
    json j{{"kind", s.kind}};
    auto pt = [](Point p) { return json::array({p.x, p.y}); };
    if (s.kind == "disk") {
        j["center"] = pt(s.center);
        j["radius"] = s.radius;
    } else if (s.kind == "strip") {
        j["center"] = pt(s.center);
        j["half_width"] = s.half_width;
    } else if (s.kind == "two_disks") {
        j["c1"] = pt(s.c1);
        j["c2"] = pt(s.c2);
        j["radius"] = s.radius;
    } else if (s.kind == "dumbbell") {
        j["c1"] = pt(s.c1);
        j["c2"] = pt(s.c2);
        j["radius"] = s.radius;
        j["neck_width"] = s.neck_width;
    } else if (s.kind == "box") {
        j["lo"] = pt(s.lo);
        j["hi"] = pt(s.hi);
    } else if (s.kind == "dilate_initial") {
        j["rho"] = s.rho;
    } else if (s.kind == "from_pgm") {
        j["path"] = s.path;
    }
    return j;
}

}  // namespace

Grid2 GridSpec::make() const {
    if (n < 4) throw InvalidArgument("grid.n must be at least 4");
    if (!(hi > lo)) throw InvalidArgument("grid.hi must exceed grid.lo");
    return Grid2::square(lo, hi, (hi - lo) / n);
}

Scenario preset(const std::string& name) {
    Scenario s;
    s.name = name;
    s.flow.h = 1e-4;
    s.flow.T = 0.02;
    if (name == "disk") {
        s.initial.kind = "disk";
        s.initial.center = {0.5, 0.5};
        s.initial.radius = 0.3;
        s.flow.variant = Variant::Unconstrained;
    } else if (name == "strip") {
        s.grid.n = 128;
        s.initial.kind = "strip";
        s.initial.center = {0.5, 0.5};
        s.initial.half_width = 0.2;
        s.flow.h = 4e-4;
        s.flow.T = 0.004;
        s.flow.variant = Variant::Unconstrained;
    } else if (name == "two_disks") {
        s.initial.kind = "two_disks";
        s.initial.c1 = {0.3, 0.5};
        s.initial.c2 = {0.7, 0.5};
        s.initial.radius = 0.15;
        s.flow.T = 0.005;
        s.flow.variant = Variant::Unconstrained;
    } else if (name == "dumbbell_pcf" || name == "dumbbell_obstacle") {
        s.initial.kind = "dumbbell";
        s.initial.c1 = {0.35, 0.5};
        s.initial.c2 = {0.65, 0.5};
        s.initial.radius = 0.12;
        s.initial.neck_width = 0.04;
        s.flow.T = 0.005;
        if (name == "dumbbell_pcf") {
            s.flow.variant = Variant::PcfFrozen;
        } else {
            s.flow.variant = Variant::Obstacle;
            s.obstacle.kind = "equals_initial";
        }
    } else if (name == "disk_in_box") {
        s.grid.n = 128;
        s.initial.kind = "disk";
        s.initial.center = {0.5, 0.5};
        s.initial.radius = 0.25;
        s.obstacle.kind = "box";
        s.obstacle.lo = {0.2, 0.2};
        s.obstacle.hi = {0.8, 0.8};
        s.flow.h = 4e-4;
        s.flow.T = 0.004;
        s.flow.variant = Variant::Obstacle;
    } else {
        throw InvalidArgument("unknown preset '" + name + "'");
    }
    return s;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    Scenario s = j.contains("preset") ? preset(field<std::string>(j, "preset", "", "")) : Scenario{};
    s.name = field<std::string>(j, "name", s.name, "");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        s.grid.n = field<int>(g, "n", s.grid.n, "grid");
        s.grid.lo = field<double>(g, "lo", s.grid.lo, "grid");
        s.grid.hi = field<double>(g, "hi", s.grid.hi, "grid");
    }
    if (j.contains("initial")) s.initial = shape_from_json(j.at("initial"), s.initial, "initial", base_dir);
    if (j.contains("obstacle")) s.obstacle = shape_from_json(j.at("obstacle"), s.obstacle, "obstacle", base_dir);
    if (j.contains("flow")) {
        const json& f = j.at("flow");
        s.flow.variant = parse_variant(field<std::string>(f, "variant", to_string(s.flow.variant), "flow"));
        s.flow.h = field<double>(f, "h", s.flow.h, "flow");
        s.flow.T = field<double>(f, "T", s.flow.T, "flow");
        s.flow.cap.value = field<double>(f, "cap", s.flow.cap.value, "flow");
        if (f.contains("forcing_C") && !f.at("forcing_C").is_null()) s.flow.forcing_C = field<double>(f, "forcing_C", 0.0, "flow");
    }
    if (j.contains("prox")) {
        const json& p = j.at("prox");
        s.flow.prox.tol = field<double>(p, "tol", s.flow.prox.tol, "prox");
        s.flow.prox.max_iter = field<int>(p, "max_iter", s.flow.prox.max_iter, "prox");
        s.flow.prox.step_ratio = field<double>(p, "step_ratio", s.flow.prox.step_ratio, "prox");
        s.flow.prox.check_every = field<int>(p, "check_every", s.flow.prox.check_every, "prox");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        s.write_fields = field<bool>(o, "fields", s.write_fields, "output");
        s.write_trace = field<bool>(o, "trace", s.write_trace, "output");
    }
    if (!(s.flow.h > 0.0)) throw InvalidArgument("config field 'flow.h' must be positive");
    if (!(s.flow.T >= s.flow.h)) throw InvalidArgument("config field 'flow.T' must be at least flow.h");
    if (!(s.flow.prox.tol > 0.0)) throw InvalidArgument("config field 'prox.tol' must be positive");
    if (s.flow.prox.max_iter < 1) throw InvalidArgument("config field 'prox.max_iter' must be at least 1");
    if (s.flow.variant == Variant::Forcing && s.flow.forcing_C && !(*s.flow.forcing_C > 0.0)) {
        throw InvalidArgument("config field 'flow.forcing_C' must be positive");
    }
    return s;
}

json to_json(const Scenario& s) {
    json flow{{"variant", to_string(s.flow.variant)}, {"h", s.flow.h}, {"T", s.flow.T}, {"cap", s.flow.cap.value}};
    flow["forcing_C"] = s.flow.forcing_C ? json(*s.flow.forcing_C) : json(nullptr);
    return json{{"name", s.name},
                {"grid", {{"n", s.grid.n}, {"lo", s.grid.lo}, {"hi", s.grid.hi}}},
                {"initial", shape_to_json(s.initial)},
                {"obstacle", shape_to_json(s.obstacle)},
                {"flow", flow},
                {"prox",
                 {{"tol", s.flow.prox.tol},
                  {"max_iter", s.flow.prox.max_iter},
                  {"step_ratio", s.flow.prox.step_ratio},
                  {"check_every", s.flow.prox.check_every}}},
                {"output", {{"fields", s.write_fields}, {"trace", s.write_trace}}}};
}

ScalarField initial_field(const Scenario& s, const Grid2& g) {
    const ShapeSpec& sh = s.initial;
    if (sh.kind == "disk") {
        if (!(sh.radius > 0.0)) throw InvalidArgument("config field 'initial.radius' must be positive");
        return ScalarField::sample(g, [&](Point p) { return disk_phi(p, sh.center, sh.radius); });
    }
    if (sh.kind == "strip") {
        if (!(sh.half_width > 0.0)) throw InvalidArgument("config field 'initial.half_width' must be positive");
        return ScalarField::sample(g, [&](Point p) { return std::abs(p.y - sh.center.y) - sh.half_width; });
    }
    if (sh.kind == "two_disks") {
        return ScalarField::sample(
            g, [&](Point p) { return std::min(disk_phi(p, sh.c1, sh.radius), disk_phi(p, sh.c2, sh.radius)); });
    }
    if (sh.kind == "dumbbell") {
        if (!(sh.neck_width > 0.0)) throw InvalidArgument("config field 'initial.neck_width' must be positive");
        return ScalarField::sample(g, [&](Point p) { return dumbbell_phi(p, sh); });
    }
    if (sh.kind == "from_pgm") return signed_distance(read_mask_pgm(sh.path, g), s.flow.cap);
    throw InvalidArgument("config field 'initial.kind' has unknown value '" + sh.kind + "'");
}

std::optional<RegionMask> obstacle_mask(const Scenario& s, const Grid2& g, const ScalarField& initial) {
    const ShapeSpec& sh = s.obstacle;
    if (sh.kind == "none") return std::nullopt;
    if (sh.kind == "box") {
        return RegionMask::sample(
            g, [&](Point p) { return p.x > sh.lo.x && p.x < sh.hi.x && p.y > sh.lo.y && p.y < sh.hi.y; });
    }
    if (sh.kind == "disk") return RegionMask::sample(g, [&](Point p) { return norm(p - sh.center) < sh.radius; });
    if (sh.kind == "equals_initial") return RegionMask::sublevel(initial);
    if (sh.kind == "dilate_initial") {
        if (!(sh.rho > 0.0)) throw InvalidArgument("config field 'obstacle.rho' must be positive");
        const ScalarField d = redistance(initial, s.flow.cap);
        return RegionMask::sublevel(d, sh.rho);
    }
    if (sh.kind == "from_pgm") return read_mask_pgm(sh.path, g);
    throw InvalidArgument("config field 'obstacle.kind' has unknown value '" + sh.kind + "'");
}

FlowTrajectory run_scenario(const Scenario& s) {
    const Grid2 g = s.grid.make();
    const ScalarField phi = initial_field(s, g);
    const auto omega = obstacle_mask(s, g, phi);
    return run(phi, omega, s.flow);
}

}  // namespace mcfobs
