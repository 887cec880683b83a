#pragma once

#include <array>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/sensor.hpp"
#include "drivestyle/wavelet.hpp"

namespace drivestyle {

// The 22-component maneuver feature vector. Component 1 is the maneuver
// duration; then three 7-component channel blocks in the fixed order
// gz (steering-wheel speed), ay (lateral acceleration), ax (direct
// acceleration). Each block is [raw variance, raw mean, var A4, var D4,
// var D3, var D2, var D1].
//
// The ay/ax block assignment (components 9-15 lateral, 16-22 direct) is
// declared once in kFeatureNames; indices elsewhere are 1-based to match
// the schema.
inline constexpr std::size_t kFeatureCount = 22;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "dur",
    "gz_var", "gz_mean", "gz_a4_var", "gz_d4_var", "gz_d3_var", "gz_d2_var", "gz_d1_var",
    "ay_var", "ay_mean", "ay_a4_var", "ay_d4_var", "ay_d3_var", "ay_d2_var", "ay_d1_var",
    "ax_var", "ax_mean", "ax_a4_var", "ax_d4_var", "ax_d3_var", "ax_d2_var", "ax_d1_var"};

struct FeatureVector {
    std::array<double, kFeatureCount> v{};

    double operator[](std::size_t i) const { return v[i]; }
    double& operator[](std::size_t i) { return v[i]; }

    bool operator==(const FeatureVector&) const = default;
};

namespace detail {

// [raw var, raw mean, var A4, var D4, var D3, var D2, var D1]
inline void channel_block(const std::vector<double>& xs, double* out) {
    out[0] = variance(xs);
    out[1] = mean(xs);
    const DwtDecomposition dec = decompose4(xs);
    out[2] = variance(dec.a4);
    out[3] = variance(dec.d4);
    out[4] = variance(dec.d3);
    out[5] = variance(dec.d2);
    out[6] = variance(dec.d1);
}

}  // namespace detail

/// Extracts the 22-component feature vector from a validated segment.
inline FeatureVector extract(const SensorSegment& segment) {
    if (segment.samples.size() < kMinSegmentSamples) {
        throw validation_error("TooShort",
                               "segment '" + segment.id + "' has fewer than " +
                                   std::to_string(kMinSegmentSamples) + " samples");
    }
    FeatureVector f;
    f.v[0] = duration(segment);
    detail::channel_block(channel_gz(segment), f.v.data() + 1);
    detail::channel_block(channel_ay(segment), f.v.data() + 8);
    detail::channel_block(channel_ax(segment), f.v.data() + 15);
    return f;
}

// --- feature matrix export -------------------------------------------------

struct FeatureRow {
    std::string segment_id;
    Label label = Label::Unlabeled;
    FeatureVector features;
};

inline std::vector<FeatureRow> extract_all(const std::vector<SensorSegment>& segments) {
    std::vector<FeatureRow> rows;
    rows.reserve(segments.size());
    for (const auto& seg : segments) {
        rows.push_back({seg.id, seg.label, extract(seg)});
    }
    return rows;
}

/// CSV export: header `segment_id,label,f01..f22`.
inline void save_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out << "segment_id,label";
    for (std::size_t i = 1; i <= kFeatureCount; ++i) {
        out << ",f" << (i < 10 ? "0" : "") << i;
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.segment_id << ',' << to_string(row.label);
        for (double v : row.features.v) {
            out << ',' << detail::format_double(v);
        }
        out << '\n';
    }
}

// Generic labeled feature table. Accepts any CSV whose first two columns are
// segment_id,label; downstream stages (selection, training, evaluation) work
// on whatever feature columns follow, which keeps the pipeline composable for
// both the 22-component wavelet family and the 6-parameter curve-fit family.
struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<Label> labels;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};

inline FeatureMatrix load_feature_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw validation_error("MissingColumn", "empty input, expected a header row");
    }
    auto header = detail::split_csv_line(line);
    if (header.size() < 3 || header[0] != "segment_id" || header[1] != "label") {
        throw validation_error("MissingColumn",
                               "expected header segment_id,label,<feature columns>");
    }
    FeatureMatrix fm;
    for (std::size_t i = 2; i < header.size(); ++i) fm.names.emplace_back(header[i]);
    std::size_t rownum = 1;
    while (std::getline(in, line)) {
        ++rownum;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw validation_error("MissingColumn",
                                   "row " + std::to_string(rownum) + ": expected " +
                                       std::to_string(header.size()) + " fields");
        }
        fm.ids.emplace_back(fields[0]);
        auto label = parse_label(fields[1]);
        if (!label) {
            throw validation_error("UnknownLabel",
                                   "row " + std::to_string(rownum) + ": '" + std::string(fields[1]) + "'");
        }
        fm.labels.push_back(*label);
        std::vector<double> row;
        row.reserve(fm.names.size());
        for (std::size_t i = 2; i < fields.size(); ++i) {
            row.push_back(detail::parse_double_field(fields[i], rownum, fm.names[i - 2]));
        }
        fm.rows.push_back(std::move(row));
    }
    return fm;
}

inline FeatureMatrix load_feature_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("FileOpen", "cannot open '" + path + "' for reading");
    }
    return load_feature_matrix_csv(in);
}

inline std::vector<FeatureRow> load_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw validation_error("MissingColumn", "empty input, expected a header row");
    }
    auto header = detail::split_csv_line(line);
    if (header.size() != kFeatureCount + 2 || header[0] != "segment_id" || header[1] != "label") {
        throw validation_error("MissingColumn", "feature CSV header mismatch");
    }
    std::vector<FeatureRow> rows;
    std::size_t rownum = 1;
    while (std::getline(in, line)) {
        ++rownum;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != kFeatureCount + 2) {
            throw validation_error("MissingColumn",
                                   "row " + std::to_string(rownum) + ": expected " +
                                       std::to_string(kFeatureCount + 2) + " fields");
        }
        FeatureRow row;
        row.segment_id = std::string(fields[0]);
        auto label = parse_label(fields[1]);
        if (!label) {
            throw validation_error("UnknownLabel",
                                   "row " + std::to_string(rownum) + ": '" + std::string(fields[1]) + "'");
        }
        row.label = *label;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            row.features.v[i] = detail::parse_double_field(fields[i + 2], rownum, std::string(kFeatureNames[i]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace drivestyle
