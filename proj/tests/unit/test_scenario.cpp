#include <doctest.h>

#include "mcfobs/scenario.hpp"

using namespace mcfobs;
using nlohmann::json;

TEST_CASE("every preset builds") {
    for (const char* name : {"disk", "strip", "two_disks", "dumbbell_pcf", "dumbbell_obstacle", "disk_in_box"}) {
        const Scenario s = preset(name);
        CHECK(s.name == name);
        const Grid2 g = s.grid.make();
        const ScalarField phi = initial_field(s, g);
        CHECK_FALSE(RegionMask::sublevel(phi).empty());
        const auto omega = obstacle_mask(s, g, phi);
        CHECK(omega.has_value() == (s.obstacle.kind != "none"));
        if (omega) CHECK(RegionMask::sublevel(phi).subset_of(*omega));
    }
    CHECK_THROWS_AS(preset("torus"), InvalidArgument);
}

TEST_CASE("config overrides the preset") {
    const json j = {{"preset", "disk"},
                    {"grid", {{"n", 64}}},
                    {"flow", {{"variant", "obstacle"}, {"h", 1e-3}, {"T", 2e-3}}},
                    {"obstacle", {{"kind", "box"}, {"lo", {0.1, 0.1}}, {"hi", {0.9, 0.9}}}}};
    const Scenario s = scenario_from_json(j);
    CHECK(s.grid.n == 64);
    CHECK(s.initial.kind == "disk");
    CHECK(s.flow.variant == Variant::Obstacle);
    CHECK(s.flow.h == 1e-3);
    CHECK(s.obstacle.lo.x == 0.1);
}

TEST_CASE("json round trip") {
    for (const char* name : {"two_disks", "dumbbell_obstacle", "disk_in_box"}) {
        const Scenario a = preset(name);
        const Scenario b = scenario_from_json(to_json(a));
        CHECK(to_json(b) == to_json(a));
    }
}

TEST_CASE("bad config fields are named") {
    CHECK_THROWS_WITH_AS(scenario_from_json(json{{"flow", {{"h", "small"}}}}), doctest::Contains("flow.h"),
                         InvalidArgument);
    CHECK_THROWS_AS(scenario_from_json(json{{"flow", {{"h", -1.0}}}}), InvalidArgument);
    CHECK_THROWS_AS(scenario_from_json(json{{"initial", {{"kind", "torus"}}}}), InvalidArgument);
    CHECK_THROWS_AS(scenario_from_json(json{{"flow", {{"variant", "fast"}}}}), InvalidArgument);
    CHECK_THROWS_AS(scenario_from_json(json{{"grid", {{"n", 2}}}}), InvalidArgument);
}

TEST_CASE("dilated obstacle contains the initial set") {
    json j = {{"preset", "two_disks"}, {"grid", {{"n", 64}}}, {"obstacle", {{"kind", "dilate_initial"}, {"rho", 0.05}}}};
    const Scenario s = scenario_from_json(j);
    const Grid2 g = s.grid.make();
    const ScalarField phi = initial_field(s, g);
    const auto omega = obstacle_mask(s, g, phi);
    REQUIRE(omega);
    CHECK(RegionMask::sublevel(phi).subset_of(*omega));
    CHECK(omega->count() > RegionMask::sublevel(phi).count());
}
