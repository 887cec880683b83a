#include <catch2/catch_amalgamated.hpp>
#include <sstream>
#include <vector>

#include "drivestyle/features.hpp"
#include "drivestyle/json_io.hpp"
#include "drivestyle/synth.hpp"

using namespace drivestyle;
using Catch::Approx;

namespace {

SensorSegment flat_segment(double gz, double ay, double ax, std::size_t n = 32) {
    SensorSegment seg;
    seg.id = "flat";
    for (std::size_t i = 0; i < n; ++i) {
        SensorSample s;
        s.t = static_cast<double>(i) / 20.0;
        s.gz = gz;
        s.ay = ay;
        s.ax = ax;
        seg.samples.push_back(s);
    }
    return seg;
}

}  // namespace

TEST_CASE("feature schema is fixed and 22 wide") {
    REQUIRE(kFeatureNames.size() == 22);
    REQUIRE(kFeatureNames[0] == "dur");
    REQUIRE(kFeatureNames[1] == "gz_var");
    REQUIRE(kFeatureNames[2] == "gz_mean");
    REQUIRE(kFeatureNames[3] == "gz_a4_var");
    REQUIRE(kFeatureNames[7] == "gz_d1_var");
    REQUIRE(kFeatureNames[8] == "ay_var");
    REQUIRE(kFeatureNames[15] == "ax_var");
    REQUIRE(kFeatureNames[21] == "ax_d1_var");
}

TEST_CASE("constant channels produce zero variances and the constant means") {
    const SensorSegment seg = flat_segment(0.5, -1.25, 2.0);
    const FeatureVector f = extract(seg);
    REQUIRE(f[0] == Approx(31.0 / 20.0).margin(1e-12));  // duration
    // raw means (1-based components 3, 10, 17)
    REQUIRE(f[2] == Approx(0.5).margin(1e-12));
    REQUIRE(f[9] == Approx(-1.25).margin(1e-12));
    REQUIRE(f[16] == Approx(2.0).margin(1e-12));
    // every variance component is zero
    for (std::size_t i : {1, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 17, 18, 19, 20, 21}) {
        REQUIRE(f[i] == Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("zero channels propagate zeros through their block") {
    SensorSegment seg = flat_segment(0.0, 0.0, 0.0);
    // gz becomes a step, ax/ay stay identically zero
    for (std::size_t i = 16; i < seg.samples.size(); ++i) seg.samples[i].gz = 1.0;
    const FeatureVector f = extract(seg);
    for (std::size_t i = 8; i < 22; ++i) {
        REQUIRE(f[i] == 0.0);
    }
    REQUIRE(f[1] > 0.0);   // gz raw variance
    REQUIRE(f[3] > 0.0);   // gz a4 variance
}

TEST_CASE("extract equals the hand-composed pipeline on a synthetic turn") {
    ScenarioSpec spec;
    spec.kind = ManeuverKind::Turn;
    spec.label = Label::Safe;
    spec.duration_s = 4.0;
    spec.amp_gz = 0.45;
    spec.seed = 42;
    const SensorSegment seg = generate(spec);
    const FeatureVector f = extract(seg);

    REQUIRE(f[0] == duration(seg));
    const std::vector<std::vector<double>> channels = {channel_gz(seg), channel_ay(seg), channel_ax(seg)};
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& xs = channels[c];
        const std::size_t base = 1 + 7 * c;
        const DwtDecomposition dec = decompose4(xs);
        REQUIRE(f[base + 0] == variance(xs));
        REQUIRE(f[base + 1] == mean(xs));
        REQUIRE(f[base + 2] == variance(dec.a4));
        REQUIRE(f[base + 3] == variance(dec.d4));
        REQUIRE(f[base + 4] == variance(dec.d3));
        REQUIRE(f[base + 5] == variance(dec.d2));
        REQUIRE(f[base + 6] == variance(dec.d1));
    }
}

TEST_CASE("scaling one channel scales only its block, quadratically for variances") {
    ScenarioSpec spec;
    spec.kind = ManeuverKind::LaneChange;
    spec.duration_s = 4.8;  // 96 samples, a multiple of 16
    spec.amp_gz = 0.4;
    spec.amp_ay = 1.6;
    spec.seed = 8;
    SensorSegment seg = generate(spec);
    REQUIRE(seg.samples.size() % 16 == 0);

    const FeatureVector before = extract(seg);
    const double alpha = 2.5;
    for (auto& s : seg.samples) s.ay *= alpha;
    const FeatureVector after = extract(seg);

    for (std::size_t i = 0; i < 22; ++i) {
        if (i == 9) {  // ay mean scales linearly
            REQUIRE(after[i] == Approx(alpha * before[i]).epsilon(1e-9).margin(1e-12));
        } else if (i >= 8 && i <= 14) {
            REQUIRE(after[i] == Approx(alpha * alpha * before[i]).epsilon(1e-9).margin(1e-12));
        } else {
            REQUIRE(after[i] == before[i]);
        }
    }
}

TEST_CASE("extract is deterministic") {
    const auto corpus = generate_corpus(ManeuverKind::Turn, 4, 3);
    for (const auto& seg : corpus) {
        REQUIRE(extract(seg) == extract(seg));
    }
}

TEST_CASE("extract rejects too-short segments") {
    REQUIRE_THROWS_AS(extract(flat_segment(0, 0, 0, 15)), Error);
}

TEST_CASE("feature CSV round-trips") {
    const auto rows = extract_all(generate_corpus(ManeuverKind::UTurn, 3, 5));
    std::ostringstream out;
    save_features_csv(out, rows);
    REQUIRE_THAT(out.str(), Catch::Matchers::StartsWith("segment_id,label,f01,f02"));

    std::istringstream in(out.str());
    const auto back = load_features_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(back[i].segment_id == rows[i].segment_id);
        REQUIRE(back[i].label == rows[i].label);
        REQUIRE(back[i].features == rows[i].features);
    }

    std::istringstream in2(out.str());
    const auto fm = load_feature_matrix_csv(in2);
    REQUIRE(fm.names.size() == 22);
    REQUIRE(fm.rows.size() == rows.size());
    REQUIRE(fm.rows[0][0] == rows[0].features[0]);
}

TEST_CASE("feature JSON mirrors the named schema") {
    const auto rows = extract_all(generate_corpus(ManeuverKind::Turn, 2, 5));
    const nlohmann::json j = features_to_json(rows);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == rows.size());
    REQUIRE(j[0].contains("segment_id"));
    REQUIRE(j[0]["features"].contains("dur"));
    REQUIRE(j[0]["features"].contains("ax_d1_var"));
    REQUIRE(j[0]["features"]["dur"].get<double>() == rows[0].features[0]);
}
