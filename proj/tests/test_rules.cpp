#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "drivestyle/rules.hpp"
#include "drivestyle/synth.hpp"

using namespace drivestyle;
using Catch::Approx;

namespace {

// brake segment whose ax ramps smoothly by `total_change` over ramp_s seconds,
// inside a segment of `duration_s`
SensorSegment ramp_segment(double total_change, double ramp_s, double duration_s = 6.0) {
    SensorSegment seg;
    seg.id = "ramp";
    seg.kind = ManeuverKind::Brake;
    const std::size_t n = static_cast<std::size_t>(duration_s * 20.0) + 1;
    const double t0 = (duration_s - ramp_s) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        SensorSample s;
        s.t = static_cast<double>(i) / 20.0;
        const double phase = std::clamp((s.t - t0) / ramp_s, 0.0, 1.0);
        s.ax = -total_change * phase;
        seg.samples.push_back(s);
    }
    return seg;
}

// step of exactly `height` m/s^2 (both values exact doubles)
SensorSegment step_segment(double height) {
    SensorSegment seg;
    seg.id = "step";
    seg.kind = ManeuverKind::Brake;
    for (std::size_t i = 0; i < 81; ++i) {
        SensorSample s;
        s.t = static_cast<double>(i) / 20.0;
        s.ax = i >= 40 ? -height : 0.0;
        seg.samples.push_back(s);
    }
    return seg;
}

}  // namespace

TEST_CASE("a 0.9 m/s^2 ramp is very safe") {
    const BrakeVerdict v = classify_braking(ramp_segment(0.9, 2.0));
    REQUIRE(v.delta_a == Approx(0.9).margin(1e-12));
    REQUIRE(v.severity == BrakeSeverity::VerySafe);
    REQUIRE(to_label(v.severity) == Label::Safe);
}

TEST_CASE("a 3.0 m/s^2 change lands between the thresholds") {
    const BrakeVerdict v = classify_braking(ramp_segment(3.0, 2.0));
    REQUIRE(v.severity == BrakeSeverity::Safe);
    REQUIRE(to_label(v.severity) == Label::Safe);
}

TEST_CASE("a 5.0 m/s^2 step is dangerous") {
    const BrakeVerdict v = classify_braking(step_segment(5.0));
    REQUIRE(v.delta_a == 5.0);
    REQUIRE(v.severity == BrakeSeverity::Dangerous);
    REQUIRE(to_label(v.severity) == Label::Dangerous);
}

TEST_CASE("thresholds are exact at the boundary") {
    const BrakeThresholds defaults;
    SECTION("delta equal to the very-safe threshold stays very safe") {
        const BrakeVerdict v = classify_braking(step_segment(defaults.very_safe));
        REQUIRE(v.delta_a == defaults.very_safe);
        REQUIRE(v.severity == BrakeSeverity::VerySafe);
    }
    SECTION("delta equal to the dangerous threshold is still safe") {
        const BrakeVerdict v = classify_braking(step_segment(defaults.dangerous));
        REQUIRE(v.delta_a == defaults.dangerous);
        REQUIRE(v.severity == BrakeSeverity::Safe);
    }
    SECTION("default thresholds are expressed in g") {
        REQUIRE(defaults.very_safe == Approx(0.11 * 9.80665).margin(1e-12));
        REQUIRE(defaults.dangerous == Approx(0.45 * 9.80665).margin(1e-12));
    }
}

TEST_CASE("scaling the acceleration change never lowers the severity") {
    double previous = -1.0;
    for (double scale : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const BrakeVerdict v = classify_braking(ramp_segment(0.9 * scale, 2.0));
        REQUIRE(v.delta_a >= previous);
        previous = v.delta_a;
    }
    REQUIRE(classify_braking(ramp_segment(0.9, 2.0)).severity == BrakeSeverity::VerySafe);
    REQUIRE(classify_braking(ramp_segment(1.8, 2.0)).severity == BrakeSeverity::Safe);
    REQUIRE(classify_braking(ramp_segment(7.2, 2.0)).severity == BrakeSeverity::Dangerous);
}

TEST_CASE("verdicts are invariant under a time shift") {
    SensorSegment seg = step_segment(3.3);
    const BrakeVerdict before = classify_braking(seg);
    for (auto& s : seg.samples) s.t += 500.25;
    const BrakeVerdict after = classify_braking(seg);
    REQUIRE(after.delta_a == before.delta_a);
    REQUIRE(after.severity == before.severity);
    // the reported window follows the shift (up to a sample if a boundary ties)
    REQUIRE(after.window_start == Approx(before.window_start + 500.25).margin(0.051));
}

TEST_CASE("gas maneuvers use the same rule") {
    SensorSegment seg = step_segment(5.0);
    seg.kind = ManeuverKind::Gas;
    for (auto& s : seg.samples) s.ax = -s.ax;
    REQUIRE(classify_braking(seg).severity == BrakeSeverity::Dangerous);
}

TEST_CASE("segments shorter than the window are rejected") {
    SensorSegment seg = step_segment(2.0);
    seg.samples.resize(41);  // 2 seconds
    REQUIRE_THROWS_AS(classify_braking(seg), Error);
}

TEST_CASE("non-longitudinal maneuvers are rejected") {
    SensorSegment seg = step_segment(2.0);
    seg.kind = ManeuverKind::Turn;
    REQUIRE_THROWS_AS(classify_braking(seg), Error);
}

TEST_CASE("the reported window brackets the worst change") {
    const BrakeVerdict v = classify_braking(step_segment(5.0));
    REQUIRE(v.window_end - v.window_start <= 3.0 + 1e-12);
    // the step happens at t = 2.0; the worst window must straddle it
    REQUIRE(v.window_start <= 2.0);
    REQUIRE(v.window_end >= 2.0);
}

TEST_CASE("synthetic dangerous braking triggers the rule") {
    ScenarioSpec spec;
    spec.kind = ManeuverKind::Brake;
    spec.label = Label::Dangerous;
    spec.duration_s = 4.0;
    spec.amp_ax = 5.0;
    spec.noise_std = 0.0;
    spec.seed = 3;
    const SensorSegment seg = generate(spec);
    REQUIRE(classify_braking(seg).severity == BrakeSeverity::Dangerous);
}
