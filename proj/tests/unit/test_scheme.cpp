#include <doctest.h>

#include <cmath>

#include "mcfobs/geometry.hpp"
#include "mcfobs/scheme.hpp"

using namespace mcfobs;

namespace {

ScalarField disk(const Grid2& g, Point c, double r) {
    return ScalarField::sample(g, [&](Point p) { return norm(p - c) - r; });
}

ScalarField star(const Grid2& g, double r = 0.15, double amp = 0.2) {
    return ScalarField::sample(g, [=](Point p) {
        const Point q = p - Point{0.5, 0.5};
        return norm(q) - r * (1.0 + amp * std::cos(3.0 * std::atan2(q.y, q.x)));
    });
}

FlowConfig config(double h, double T, Variant v) {
    FlowConfig cfg;
    cfg.h = h;
    cfg.T = T;
    cfg.variant = v;
    return cfg;
}

}  // namespace

TEST_CASE("variant names round trip") {
    for (Variant v : {Variant::Obstacle, Variant::Unconstrained, Variant::Forcing, Variant::PcfFrozen,
                      Variant::PcfRefresh}) {
        CHECK(parse_variant(to_string(v)) == v);
    }
    CHECK_THROWS_AS(parse_variant("obstacles"), InvalidArgument);
}

TEST_CASE("pinning regime threshold") {
    const double s = 1.0 / 64.0;
    CHECK(pinning_regime(1e-4, s));
    CHECK_FALSE(pinning_regime(2e-3, s));
}

TEST_CASE("a horizontal strip does not move") {
    const Grid2 g = Grid2::unit_square(64);
    const ScalarField d0 = ScalarField::sample(g, [](Point p) { return std::abs(p.y - 0.5) - 0.2; });
    const FlowTrajectory t = run(d0, std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained));
    REQUIRE(t.states.size() == 4);
    for (const auto& s : t.states) CHECK(s.mask == t.states.front().mask);
}

TEST_CASE("step count and times") {
    const Grid2 g = Grid2::unit_square(64);
    const FlowTrajectory t = run(disk(g, {0.5, 0.5}, 0.15), std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained));
    REQUIRE(t.states.size() == 4);
    const auto times = t.times();
    CHECK(times[0] == 0.0);
    CHECK(times[3] == doctest::Approx(3e-3));
    for (std::size_t n = 1; n < t.states.size(); ++n) {
        CHECK(t.states[n].step == static_cast<int>(n));
        CHECK(t.states[n].mask.subset_of(t.states[n - 1].mask));
        CHECK(t.states[n].diag.converged);
    }
}

TEST_CASE("a small disk goes extinct") {
    const Grid2 g = Grid2::unit_square(64);
    const FlowTrajectory t = run(disk(g, {0.5, 0.5}, 0.1), std::nullopt, config(1e-3, 0.02, Variant::Unconstrained));
    REQUIRE(t.extinction_step.has_value());
    // continuum extinction at r^2 / 2 = 5e-3
    CHECK(*t.extinction_step * 1e-3 == doctest::Approx(5e-3).epsilon(0.4));
    CHECK(t.states.back().mask.empty());
    REQUIRE(t.states.back().field.has_value());
    CHECK(t.states.back().field->min() > 0.0);
}

TEST_CASE("forcing with the whole grid as obstacle equals the unconstrained flow") {
    const Grid2 g = Grid2::unit_square(64);
    const ScalarField d0 = disk(g, {0.5, 0.5}, 0.15);
    FlowConfig cf = config(1e-3, 3e-3, Variant::Forcing);
    cf.forcing_C = 50.0;
    const FlowTrajectory a = run(d0, RegionMask(g, true), cf);
    const FlowTrajectory b = run(d0, std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained));
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t n = 0; n < a.states.size(); ++n) CHECK(a.states[n].mask == b.states[n].mask);
}

TEST_CASE("concave parts escape the obstacle only without the constraint") {
    const Grid2 g = Grid2::unit_square(128);
    const ScalarField d0 = star(g, 0.2, 0.3);
    const RegionMask omega = RegionMask::sublevel(d0);
    const FlowTrajectory held = run(d0, omega, config(4e-4, 1.2e-3, Variant::Obstacle));
    for (const auto& s : held.states) CHECK(s.mask.subset_of(omega));
    const FlowTrajectory free = run(d0, std::nullopt, config(4e-4, 1.2e-3, Variant::Unconstrained));
    CHECK_FALSE(free.states.back().mask.subset_of(omega));

    FlowConfig zero = config(4e-4, 1.2e-3, Variant::Forcing);
    zero.forcing_C = 0.0;
    CHECK_THROWS_WITH_AS(run(d0, omega, zero), "forcing constant must be positive", InvalidArgument);
}

TEST_CASE("run validation") {
    const Grid2 g = Grid2::unit_square(64);
    const ScalarField d0 = disk(g, {0.5, 0.5}, 0.15);
    const RegionMask small = RegionMask::sublevel(disk(g, {0.5, 0.5}, 0.1));
    CHECK_THROWS_WITH_AS(run(d0, small, config(1e-3, 3e-3, Variant::Obstacle)),
                         "initial set not contained in obstacle", InvalidArgument);
    CHECK_THROWS_AS(run(d0, std::nullopt, config(1e-3, 3e-3, Variant::Obstacle)), InvalidArgument);
    CHECK_THROWS_AS(run(d0, std::nullopt, config(1e-3, 5e-4, Variant::Unconstrained)), InvalidArgument);
    CHECK_THROWS_AS(run(disk(g, {0.5, 0.5}, 0.35), std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained)),
                    InvalidArgument);
    CHECK_THROWS_AS(run(ScalarField(g, 1.0), std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained)),
                    VanishedSet);
    CHECK_THROWS_AS(run(RegionMask(g), std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained)), InvalidArgument);

    const FlowTrajectory pinned = run(d0, std::nullopt, config(1e-4, 1e-4, Variant::Unconstrained));
    REQUIRE(pinned.warnings.size() == 1);
    CHECK(pinned.warnings[0].rfind("pinning regime", 0) == 0);
}

TEST_CASE("frozen PCF first step is the obstacle step with v = d0") {
    const Grid2 g = Grid2::unit_square(64);
    const ScalarField d0 = star(g);
    const FlowConfig cfg = config(1e-3, 1e-3, Variant::PcfFrozen);
    const FlowTrajectory t = pcf_run(d0, cfg);
    const ScalarField e0 = redistance(d0, cfg.cap);
    const StepOutput one = step(e0, ObstacleSpec::constrained(e0), cfg);
    CHECK(t.states[1].mask == one.mask);
    CHECK(one.mask.subset_of(t.states[0].mask));
}

TEST_CASE("an obstacle equal to a disk leaves the disk flow unchanged") {
    // A disk shrinks, so the constraint u >= d_omega for omega = E0 never binds.
    const Grid2 g = Grid2::unit_square(64);
    const ScalarField d0 = disk(g, {0.5, 0.5}, 0.15);
    const RegionMask e0 = RegionMask::sublevel(d0);
    const FlowTrajectory a = run(d0, e0, config(1e-3, 3e-3, Variant::Obstacle));
    const FlowTrajectory b = run(d0, std::nullopt, config(1e-3, 3e-3, Variant::Unconstrained));
    for (std::size_t n = 0; n < a.states.size(); ++n) CHECK(a.states[n].mask == b.states[n].mask);
}

TEST_CASE("non-convergence carries the step index") {
    const Grid2 g = Grid2::unit_square(64);
    FlowConfig cfg = config(1e-3, 3e-3, Variant::Unconstrained);
    cfg.prox.max_iter = 2;
    cfg.prox.tol = 1e-12;
    try {
        (void)run(disk(g, {0.5, 0.5}, 0.15), std::nullopt, cfg);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.step() == 1);
        CHECK_FALSE(e.partial().prox.converged);
    }
}
