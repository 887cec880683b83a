#pragma once

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/gaussfit.hpp"
#include "drivestyle/mlp.hpp"
#include "drivestyle/nca.hpp"
#include "drivestyle/rbf.hpp"
#include "drivestyle/rules.hpp"
#include "drivestyle/svm.hpp"

namespace drivestyle {

/// Named-schema mirror of the feature matrix.
inline nlohmann::json features_to_json(const std::vector<FeatureRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json features;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            features[std::string(kFeatureNames[i])] = row.features.v[i];
        }
        out.push_back({{"segment_id", row.segment_id},
                       {"label", std::string(to_string(row.label))},
                       {"features", features}});
    }
    return out;
}

inline nlohmann::json weights_to_json(const FeatureWeights& fw, double threshold = 0.1) {
    return {{"weights", fw.w},
            {"selected", select(fw, threshold)},
            {"objective_trace", fw.objective_trace},
            {"converged", fw.converged}};
}

inline nlohmann::json verdict_to_json(const SensorSegment& segment, const BrakeVerdict& verdict) {
    return {{"segment_id", segment.id},
            {"kind", std::string(to_string(segment.kind))},
            {"delta_a", verdict.delta_a},
            {"severity", std::string(to_string(verdict.severity))},
            {"label", std::string(to_string(to_label(verdict.severity)))},
            {"window", {{"t_start", verdict.window_start}, {"t_end", verdict.window_end}}}};
}

inline nlohmann::json fit_to_json(const SensorSegment& segment, const TwoGaussianFit& fit) {
    const GaussianPair& p = fit.params;
    return {{"segment_id", segment.id}, {"a1", p.a1}, {"b1", p.b1}, {"c1", p.c1},
            {"a2", p.a2},               {"b2", p.b2}, {"c2", p.c2}, {"rmse", p.rmse},
            {"converged", fit.converged}};
}

inline nlohmann::json model_to_json(const MlpModel& m) {
    return {{"algorithm", "mlp"},    {"input_dim", m.input_dim}, {"hidden_count", m.hidden_count},
            {"hidden_weights", m.w1}, {"hidden_bias", m.b1},     {"output_weights", m.w2},
            {"output_bias", m.b2}};
}

inline nlohmann::json model_to_json(const RbfModel& m) {
    return {{"algorithm", "rbf"},
            {"centers", m.centers},
            {"widths", m.widths},
            {"output_weights", m.output_weights},
            {"output_bias", m.output_bias}};
}

inline nlohmann::json model_to_json(const SvmModel& m) {
    nlohmann::json sv = nlohmann::json::array();
    for (std::size_t i = 0; i < m.alphas.size(); ++i) {
        if (m.alphas[i] > 0.0) {
            sv.push_back({{"x", m.train_x[i]}, {"y", m.train_y[i]}, {"alpha", m.alphas[i]}});
        }
    }
    return {{"algorithm", "svm"},
            {"kernel", m.kernel == SvmKernel::Linear ? "linear" : "gaussian"},
            {"gamma", m.gamma},
            {"C", m.C},
            {"bias", m.bias},
            {"support_vectors", sv},
            {"converged", m.converged}};
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("FileOpen", "cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
}

}  // namespace drivestyle
