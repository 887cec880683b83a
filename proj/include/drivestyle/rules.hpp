#pragma once

#include <deque>
#include <string>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/sensor.hpp"

namespace drivestyle {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

enum class BrakeSeverity { VerySafe, Safe, Dangerous };

inline std::string_view to_string(BrakeSeverity s) {
    switch (s) {
        case BrakeSeverity::VerySafe: return "very_safe";
        case BrakeSeverity::Safe: return "safe";
        case BrakeSeverity::Dangerous: return "dangerous";
    }
    return "?";
}

struct BrakeVerdict {
    double delta_a = 0.0;  // worst-case max-minus-min of ax inside the window
    BrakeSeverity severity = BrakeSeverity::VerySafe;
    double window_start = 0.0;
    double window_end = 0.0;
};

/// Both safe grades collapse to Safe when compared against a classifier.
inline Label to_label(BrakeSeverity s) {
    return s == BrakeSeverity::Dangerous ? Label::Dangerous : Label::Safe;
}

struct BrakeThresholds {
    double very_safe = 0.11 * kStandardGravity;  // delta_a <= this: very safe
    double dangerous = 0.45 * kStandardGravity;  // delta_a > this: dangerous
    double window_s = 3.0;
};

/// Classifies a braking or gas maneuver by the largest longitudinal
/// acceleration change observed inside any window of window_s seconds.
/// Boundary behavior is exact: delta_a == very_safe is VerySafe, and
/// delta_a == dangerous is still Safe.
inline BrakeVerdict classify_braking(const SensorSegment& segment, BrakeThresholds thresholds = {}) {
    if (segment.kind != ManeuverKind::Brake && segment.kind != ManeuverKind::Gas) {
        throw validation_error("WrongKind",
                               "segment '" + segment.id + "' is a " + std::string(to_string(segment.kind)) +
                                   " maneuver, not brake/gas");
    }
    if (duration(segment) < thresholds.window_s) {
        throw validation_error("WindowTooLong",
                               "segment '" + segment.id + "' is shorter than the " +
                                   detail::format_double(thresholds.window_s) + " s window");
    }

    // sliding max/min over all samples within window_s of the window's end;
    // every pair of samples at most window_s apart lands in some window
    const auto& samples = segment.samples;
    std::deque<std::size_t> maxdq, mindq;
    BrakeVerdict verdict;
    verdict.delta_a = -1.0;
    std::size_t lo = 0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        while (lo < j && samples[j].t - samples[lo].t > thresholds.window_s) {
            if (!maxdq.empty() && maxdq.front() == lo) maxdq.pop_front();
            if (!mindq.empty() && mindq.front() == lo) mindq.pop_front();
            ++lo;
        }
        while (!maxdq.empty() && samples[maxdq.back()].ax <= samples[j].ax) maxdq.pop_back();
        maxdq.push_back(j);
        while (!mindq.empty() && samples[mindq.back()].ax >= samples[j].ax) mindq.pop_back();
        mindq.push_back(j);

        const double spread = samples[maxdq.front()].ax - samples[mindq.front()].ax;
        if (spread > verdict.delta_a) {
            verdict.delta_a = spread;
            verdict.window_start = samples[lo].t;
            verdict.window_end = samples[j].t;
        }
    }

    if (verdict.delta_a > thresholds.dangerous) {
        verdict.severity = BrakeSeverity::Dangerous;
    } else if (verdict.delta_a <= thresholds.very_safe) {
        verdict.severity = BrakeSeverity::VerySafe;
    } else {
        verdict.severity = BrakeSeverity::Safe;
    }
    return verdict;
}

}  // namespace drivestyle
