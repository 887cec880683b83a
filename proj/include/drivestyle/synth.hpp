#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/rng.hpp"
#include "drivestyle/sensor.hpp"

namespace drivestyle {

// Synthetic maneuver request. Shapes are simple analytic envelopes on an
// exact 20 Hz grid: a single gz bump for turns and U-turns, an opposite-sign
// gz/ay bump pair for lane changes, a smoothed ax step for brake/gas. White
// Gaussian noise is added to every channel from per-channel derived seeds.
struct ScenarioSpec {
    ManeuverKind kind = ManeuverKind::Turn;
    Label label = Label::Safe;
    double duration_s = 4.0;
    double amp_gz = 0.0;   // rad/s
    double amp_ay = 0.0;   // m/s^2
    double amp_ax = 0.0;   // m/s^2
    double noise_std = 0.02;
    std::uint64_t seed = 0;
    double rate_hz = 20.0;
};

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Default duration/amplitude ranges per maneuver kind. Dangerous ranges sit
// strictly below the safe ones in duration and strictly above in amplitude,
// so dangerous maneuvers are faster and sharper at any draw.
struct KindDefaults {
    ParamRange safe_duration, dangerous_duration;
    ParamRange safe_amplitude, dangerous_amplitude;  // primary channel of the kind
    double lateral_ratio = 0.0;  // ay amplitude per unit gz (lane change)
    double noise_std = 0.02;
};

inline KindDefaults kind_defaults(ManeuverKind kind) {
    switch (kind) {
        case ManeuverKind::Turn:
            return {{3.0, 6.0}, {1.0, 2.5}, {0.35, 0.55}, {0.70, 1.10}, 0.0, 0.02};
        case ManeuverKind::UTurn:
            return {{5.0, 8.0}, {2.0, 3.5}, {0.45, 0.65}, {0.90, 1.30}, 0.0, 0.02};
        case ManeuverKind::LaneChange:
            return {{3.0, 6.0}, {1.0, 2.5}, {0.30, 0.50}, {0.60, 1.00}, 4.0, 0.02};
        case ManeuverKind::Brake:
        case ManeuverKind::Gas:
            return {{4.5, 6.0}, {3.2, 4.4}, {0.8, 2.5}, {4.8, 7.0}, 0.0, 0.02};
    }
    return {};
}

namespace detail {

inline double gauss_bump(double t, double center, double width) {
    const double z = (t - center) / width;
    return std::exp(-0.5 * z * z);
}

}  // namespace detail

/// Fills the amplitude fields of `spec` by drawing from the default ranges
/// for its kind/label with the given rng.
inline void draw_scenario_amplitudes(ScenarioSpec& spec, Rng& rng) {
    const KindDefaults defs = kind_defaults(spec.kind);
    const bool dangerous = spec.label == Label::Dangerous;
    const ParamRange amp = dangerous ? defs.dangerous_amplitude : defs.safe_amplitude;
    const double primary = rng.uniform(amp.lo, amp.hi);
    spec.noise_std = defs.noise_std;
    switch (spec.kind) {
        case ManeuverKind::Turn:
        case ManeuverKind::UTurn:
            spec.amp_gz = primary;
            break;
        case ManeuverKind::LaneChange:
            spec.amp_gz = primary;
            spec.amp_ay = primary * defs.lateral_ratio;
            break;
        case ManeuverKind::Brake:
        case ManeuverKind::Gas:
            spec.amp_ax = primary;
            break;
    }
}

/// Deterministic synthetic segment for the scenario; identical specs yield
/// bit-identical segments.
inline SensorSegment generate(const ScenarioSpec& spec) {
    const double n_real = spec.duration_s * spec.rate_hz;
    if (n_real < 16.0) {
        throw validation_error("TooShortSpec",
                               "duration " + detail::format_double(spec.duration_s) + " s at " +
                                   detail::format_double(spec.rate_hz) + " Hz yields fewer than 16 samples");
    }
    const std::size_t n = static_cast<std::size_t>(std::llround(n_real));
    const double span = static_cast<double>(n - 1) / spec.rate_hz;

    SensorSegment seg;
    seg.kind = spec.kind;
    seg.label = spec.label;
    seg.rate_hz = spec.rate_hz;
    seg.samples.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.rate_hz;
        SensorSample& s = seg.samples[i];
        s.t = t;
        switch (spec.kind) {
            case ManeuverKind::Turn:
                s.gz = spec.amp_gz * detail::gauss_bump(t, span / 2.0, span / 6.0);
                break;
            case ManeuverKind::UTurn:
                // wider bump: larger swept angle for the same peak rate
                s.gz = spec.amp_gz * detail::gauss_bump(t, span / 2.0, span / 4.0);
                break;
            case ManeuverKind::LaneChange: {
                const double shape = detail::gauss_bump(t, span / 3.0, span / 8.0) -
                                     detail::gauss_bump(t, 2.0 * span / 3.0, span / 8.0);
                s.gz = spec.amp_gz * shape;
                s.ay = spec.amp_ay * shape;
                break;
            }
            case ManeuverKind::Brake:
                s.ax = -spec.amp_ax * 0.5 * (1.0 + std::tanh((t - span / 2.0) / (span / 10.0)));
                break;
            case ManeuverKind::Gas:
                s.ax = spec.amp_ax * 0.5 * (1.0 + std::tanh((t - span / 2.0) / (span / 10.0)));
                break;
        }
    }

    if (spec.noise_std > 0.0) {
        // independent per-channel noise streams
        double SensorSample::*channels[] = {&SensorSample::ax, &SensorSample::ay, &SensorSample::az,
                                            &SensorSample::gx, &SensorSample::gy, &SensorSample::gz};
        for (std::size_t ch = 0; ch < 6; ++ch) {
            Rng rng(derive_seed(spec.seed, ch));
            for (auto& s : seg.samples) {
                s.*channels[ch] += rng.normal(0.0, spec.noise_std);
            }
        }
    }
    return seg;
}

/// n_per_class safe plus n_per_class dangerous segments of the kind, with
/// durations and amplitudes jittered inside the default ranges. Deterministic
/// per master_seed.
inline std::vector<SensorSegment> generate_corpus(ManeuverKind kind, std::size_t n_per_class,
                                                  std::uint64_t master_seed) {
    if (n_per_class < 1) {
        throw validation_error("TooShortSpec", "n_per_class must be >= 1");
    }
    const KindDefaults defs = kind_defaults(kind);
    std::vector<SensorSegment> corpus;
    corpus.reserve(2 * n_per_class);
    std::size_t index = 0;
    for (Label label : {Label::Safe, Label::Dangerous}) {
        const ParamRange dur = label == Label::Dangerous ? defs.dangerous_duration : defs.safe_duration;
        for (std::size_t i = 0; i < n_per_class; ++i, ++index) {
            Rng rng(derive_seed(master_seed, index));
            ScenarioSpec spec;
            spec.kind = kind;
            spec.label = label;
            spec.duration_s = rng.uniform(dur.lo, dur.hi);
            draw_scenario_amplitudes(spec, rng);
            spec.seed = derive_seed(master_seed, 100000 + index);

            char id[64];
            std::snprintf(id, sizeof(id), "%s_%s_%03zu", std::string(to_string(kind)).c_str(),
                          std::string(to_string(label)).c_str(), i);
            SensorSegment seg = generate(spec);
            seg.id = id;
            corpus.push_back(std::move(seg));
        }
    }
    return corpus;
}

}  // namespace drivestyle
