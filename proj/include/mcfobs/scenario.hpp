#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mcfobs/grid.hpp"
#include "mcfobs/scheme.hpp"

namespace mcfobs {

/// Square grid [lo, hi]^2 with n cells per side.
struct GridSpec {
    int n = 256;
    double lo = 0.0;
    double hi = 1.0;

    Grid2 make() const;
};

/// Initial set: disk | strip | two_disks | dumbbell | from_pgm.
/// Obstacle: none | box | disk | dilate_initial | equals_initial | from_pgm.
struct ShapeSpec {
    std::string kind = "none";
    Point center{0.5, 0.5};
    double radius = 0.3;
    double half_width = 0.2;  // strip: |y - center.y| < half_width
    Point c1{0.35, 0.5};
    Point c2{0.65, 0.5};
    double neck_width = 0.04;
    Point lo{0.0, 0.0};  // box corners
    Point hi{1.0, 1.0};
    double rho = 0.05;  // dilate_initial
    std::string path;   // from_pgm
};

struct Scenario {
    std::string name = "custom";
    GridSpec grid;
    ShapeSpec initial;
    ShapeSpec obstacle;
    FlowConfig flow;
    bool write_fields = false;
    bool write_trace = false;
};

/// Presets: disk, strip, two_disks, dumbbell_pcf, dumbbell_obstacle,
/// disk_in_box. Throws InvalidArgument for unknown names.
Scenario preset(const std::string& name);

/// Parses a config document; "preset" (if present) supplies defaults that
/// the other keys override. Throws InvalidArgument naming the bad field.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const Scenario& s);

/// Level-set function of the initial set (negative inside). Analytic for the
/// built-in shapes, signed distance of the image for from_pgm.
ScalarField initial_field(const Scenario& s, const Grid2& g);
std::optional<RegionMask> obstacle_mask(const Scenario& s, const Grid2& g, const ScalarField& initial);

/// Validates and runs the scenario.
FlowTrajectory run_scenario(const Scenario& s);

}  // namespace mcfobs
