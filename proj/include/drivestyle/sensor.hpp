#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "drivestyle/error.hpp"

namespace drivestyle {

enum class ManeuverKind { Turn, UTurn, LaneChange, Brake, Gas };
enum class Label { Safe, Dangerous, Unlabeled };

// One 6-axis IMU reading. ax is the longitudinal (direct) acceleration, ay the
// lateral one; gz is the steering-wheel angular speed. az/gx/gy are carried
// through ingestion and export but take no part in any feature.
struct SensorSample {
    double t = 0.0;   // seconds
    double ax = 0.0;  // m/s^2
    double ay = 0.0;  // m/s^2
    double az = 0.0;  // m/s^2
    double gx = 0.0;  // rad/s
    double gy = 0.0;  // rad/s
    double gz = 0.0;  // rad/s

    bool operator==(const SensorSample&) const = default;
};

// Minimum samples for a 4-level halving decomposition to keep level-4
// coefficients nonempty.
inline constexpr std::size_t kMinSegmentSamples = 16;

struct SensorSegment {
    std::string id;
    ManeuverKind kind = ManeuverKind::Turn;
    Label label = Label::Unlabeled;
    double rate_hz = 20.0;
    std::vector<SensorSample> samples;

    bool operator==(const SensorSegment&) const = default;
};

inline std::string_view to_string(ManeuverKind k) {
    switch (k) {
        case ManeuverKind::Turn: return "turn";
        case ManeuverKind::UTurn: return "uturn";
        case ManeuverKind::LaneChange: return "lane_change";
        case ManeuverKind::Brake: return "brake";
        case ManeuverKind::Gas: return "gas";
    }
    return "?";
}

inline std::string_view to_string(Label l) {
    switch (l) {
        case Label::Safe: return "safe";
        case Label::Dangerous: return "dangerous";
        case Label::Unlabeled: return "unlabeled";
    }
    return "?";
}

inline std::optional<ManeuverKind> parse_kind(std::string_view s) {
    if (s == "turn") return ManeuverKind::Turn;
    if (s == "uturn") return ManeuverKind::UTurn;
    if (s == "lane_change") return ManeuverKind::LaneChange;
    if (s == "brake") return ManeuverKind::Brake;
    if (s == "gas") return ManeuverKind::Gas;
    return std::nullopt;
}

inline std::optional<Label> parse_label(std::string_view s) {
    if (s == "safe") return Label::Safe;
    if (s == "dangerous") return Label::Dangerous;
    if (s == "unlabeled") return Label::Unlabeled;
    return std::nullopt;
}

/// Maneuver duration: last timestamp minus first.
inline double duration(const SensorSegment& segment) {
    if (segment.samples.empty()) return 0.0;
    return segment.samples.back().t - segment.samples.front().t;
}

// Validates the segment invariants: finite values, >= 16 samples, strictly
// increasing timestamps with spacing within +-10% of the nominal period.
// `where` names the segment in error messages.
inline void validate_segment(const SensorSegment& segment, const std::string& where = "") {
    const std::string ctx = where.empty() ? segment.id : where;
    if (segment.samples.size() < kMinSegmentSamples) {
        throw validation_error("TooShortSegment",
                               "segment '" + ctx + "' has " + std::to_string(segment.samples.size()) +
                                   " samples, need >= " + std::to_string(kMinSegmentSamples));
    }
    if (!(segment.rate_hz > 0.0) || !std::isfinite(segment.rate_hz)) {
        throw validation_error("NonFiniteValue", "segment '" + ctx + "' has invalid rate_hz");
    }
    const double period = 1.0 / segment.rate_hz;
    for (std::size_t i = 0; i < segment.samples.size(); ++i) {
        const SensorSample& s = segment.samples[i];
        for (double v : {s.t, s.ax, s.ay, s.az, s.gx, s.gy, s.gz}) {
            if (!std::isfinite(v)) {
                throw validation_error("NonFiniteValue",
                                       "segment '" + ctx + "' sample " + std::to_string(i));
            }
        }
        if (i > 0) {
            const double dt = s.t - segment.samples[i - 1].t;
            if (dt <= 0.0) {
                throw validation_error("NonMonotoneTime",
                                       "segment '" + ctx + "' sample " + std::to_string(i) +
                                           ": t does not strictly increase");
            }
            if (dt < 0.9 * period || dt > 1.1 * period) {
                throw validation_error("NonUniformSampling",
                                       "segment '" + ctx + "' sample " + std::to_string(i) +
                                           ": spacing outside +-10% of nominal period");
            }
        }
    }
}

namespace detail {

// Shortest round-trip decimal text for a double, so that CSV/JSON exports
// re-parse to the identical bits.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double_field(std::string_view s, std::size_t row, const std::string& col) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw validation_error("NonFiniteValue",
                               "row " + std::to_string(row) + ": column '" + col +
                                   "' is not a number: '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) {
        throw validation_error("NonFiniteValue",
                               "row " + std::to_string(row) + ": column '" + col + "' is not finite");
    }
    return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 10> kSegmentCsvColumns = {
    "segment_id", "kind", "label", "t", "ax", "ay", "az", "gx", "gy", "gz"};

/// Parses segments from the CSV stream. One file may hold many segments keyed
/// by segment_id; rows of one segment must be contiguous. Every parsed segment
/// is validated; failures carry the 1-based row number of the offending line.
inline std::vector<SensorSegment> load_segments(std::istream& in, double rate_hz = 20.0) {
    std::string line;
    if (!std::getline(in, line)) {
        throw validation_error("MissingColumn", "empty input, expected a header row");
    }
    auto header = detail::split_csv_line(line);
    if (header.size() != kSegmentCsvColumns.size()) {
        throw validation_error("MissingColumn",
                               "expected " + std::to_string(kSegmentCsvColumns.size()) +
                                   " columns, found " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != kSegmentCsvColumns[i]) {
            throw validation_error("MissingColumn",
                                   "column " + std::to_string(i + 1) + " is '" + std::string(header[i]) +
                                       "', expected '" + std::string(kSegmentCsvColumns[i]) + "'");
        }
    }

    std::vector<SensorSegment> segments;
    std::map<std::string, std::size_t> first_row_of;  // detects non-contiguous ids
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != kSegmentCsvColumns.size()) {
            throw validation_error("MissingColumn",
                                   "row " + std::to_string(row) + ": expected " +
                                       std::to_string(kSegmentCsvColumns.size()) + " fields, found " +
                                       std::to_string(fields.size()));
        }
        std::string id(fields[0]);
        auto kind = parse_kind(fields[1]);
        if (!kind) {
            throw validation_error("UnknownKind",
                                   "row " + std::to_string(row) + ": '" + std::string(fields[1]) + "'");
        }
        auto label = parse_label(fields[2]);
        if (!label) {
            throw validation_error("UnknownLabel",
                                   "row " + std::to_string(row) + ": '" + std::string(fields[2]) + "'");
        }
        SensorSample sample;
        sample.t = detail::parse_double_field(fields[3], row, "t");
        sample.ax = detail::parse_double_field(fields[4], row, "ax");
        sample.ay = detail::parse_double_field(fields[5], row, "ay");
        sample.az = detail::parse_double_field(fields[6], row, "az");
        sample.gx = detail::parse_double_field(fields[7], row, "gx");
        sample.gy = detail::parse_double_field(fields[8], row, "gy");
        sample.gz = detail::parse_double_field(fields[9], row, "gz");

        if (segments.empty() || segments.back().id != id) {
            auto [it, inserted] = first_row_of.emplace(id, row);
            if (!inserted) {
                throw validation_error("NonContiguousSegment",
                                       "row " + std::to_string(row) + ": segment '" + id +
                                           "' already appeared at row " + std::to_string(it->second));
            }
            SensorSegment seg;
            seg.id = std::move(id);
            seg.kind = *kind;
            seg.label = *label;
            seg.rate_hz = rate_hz;
            segments.push_back(std::move(seg));
        } else {
            if (!segments.back().samples.empty() && sample.t <= segments.back().samples.back().t) {
                throw validation_error("NonMonotoneTime",
                                       "row " + std::to_string(row) + ": t does not strictly increase");
            }
        }
        segments.back().samples.push_back(sample);
    }

    for (const auto& seg : segments) {
        validate_segment(seg);
    }
    return segments;
}

inline std::vector<SensorSegment> load_segments_file(const std::string& path, double rate_hz = 20.0) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("FileOpen", "cannot open '" + path + "' for reading");
    }
    return load_segments(in, rate_hz);
}

inline void save_segments(std::ostream& out, const std::vector<SensorSegment>& segments) {
    for (std::size_t i = 0; i < kSegmentCsvColumns.size(); ++i) {
        if (i) out << ',';
        out << kSegmentCsvColumns[i];
    }
    out << '\n';
    for (const auto& seg : segments) {
        for (const auto& s : seg.samples) {
            out << seg.id << ',' << to_string(seg.kind) << ',' << to_string(seg.label) << ','
                << detail::format_double(s.t) << ',' << detail::format_double(s.ax) << ','
                << detail::format_double(s.ay) << ',' << detail::format_double(s.az) << ','
                << detail::format_double(s.gx) << ',' << detail::format_double(s.gy) << ','
                << detail::format_double(s.gz) << '\n';
        }
    }
}

inline void save_segments_file(const std::string& path, const std::vector<SensorSegment>& segments) {
    std::ofstream out(path);
    if (!out) {
        throw io_error("FileOpen", "cannot open '" + path + "' for writing");
    }
    save_segments(out, segments);
}

inline std::vector<double> channel_gz(const SensorSegment& s) {
    std::vector<double> xs(s.samples.size());
    std::transform(s.samples.begin(), s.samples.end(), xs.begin(), [](const SensorSample& p) { return p.gz; });
    return xs;
}

inline std::vector<double> channel_ay(const SensorSegment& s) {
    std::vector<double> xs(s.samples.size());
    std::transform(s.samples.begin(), s.samples.end(), xs.begin(), [](const SensorSample& p) { return p.ay; });
    return xs;
}

inline std::vector<double> channel_ax(const SensorSegment& s) {
    std::vector<double> xs(s.samples.size());
    std::transform(s.samples.begin(), s.samples.end(), xs.begin(), [](const SensorSample& p) { return p.ax; });
    return xs;
}

}  // namespace drivestyle
