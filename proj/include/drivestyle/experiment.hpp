#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/evaluate.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/gaussfit.hpp"
#include "drivestyle/nca.hpp"
#include "drivestyle/sensor.hpp"
#include "drivestyle/synth.hpp"

namespace drivestyle {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class FeatureSource { Wavelet22, Gaussian6 };

inline std::string_view to_string(FeatureSource s) {
    return s == FeatureSource::Wavelet22 ? "wavelet22" : "gaussian6";
}

// A fully serializable experiment description: persisting the config and
// re-running it reproduces every report byte for byte.
struct ExperimentConfig {
    // input: either a segments CSV or a synthetic corpus to generate
    std::string segments_csv;  // empty means synthesize
    ManeuverKind synth_kind = ManeuverKind::Turn;
    std::size_t synth_per_class = 120;
    std::uint64_t synth_seed = 42;

    FeatureSource feature_source = FeatureSource::Wavelet22;

    bool selection_enabled = true;
    double selection_threshold = 0.1;
    NcaParams nca;

    std::string algorithm = "mlp";           // mlp | rbf | svm
    std::vector<std::size_t> mlp_hidden = {2, 3, 4, 5, 6};
    std::size_t mlp_epochs = 2000;
    double mlp_lr = 0.5;
    std::vector<std::size_t> rbf_k = {2, 4, 6};
    std::string svm_kernel = "gaussian";  // gaussian | linear
    double svm_c = 1.0;
    double svm_gamma = -1.0;

    SplitPlan split;
    std::uint64_t master_seed = 7;
    std::string output_dir = "out";
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
    j = nlohmann::json{
        {"input",
         cfg.segments_csv.empty()
             ? nlohmann::json{{"synth",
                               {{"kind", std::string(to_string(cfg.synth_kind))},
                                {"n_per_class", cfg.synth_per_class},
                                {"seed", cfg.synth_seed}}}}
             : nlohmann::json{{"segments_csv", cfg.segments_csv}}},
        {"feature_source", std::string(to_string(cfg.feature_source))},
        {"selection",
         {{"enabled", cfg.selection_enabled},
          {"threshold", cfg.selection_threshold},
          {"lambda", cfg.nca.lambda},
          {"sigma", cfg.nca.sigma},
          {"lr", cfg.nca.lr},
          {"max_iters", cfg.nca.max_iters},
          {"seed", cfg.nca.seed}}},
        {"classifier",
         {{"algorithm", cfg.algorithm},
          {"mlp_hidden", cfg.mlp_hidden},
          {"mlp_epochs", cfg.mlp_epochs},
          {"mlp_lr", cfg.mlp_lr},
          {"rbf_k", cfg.rbf_k},
          {"svm_kernel", cfg.svm_kernel},
          {"svm_c", cfg.svm_c},
          {"svm_gamma", cfg.svm_gamma}}},
        {"split", {{"train_fraction", cfg.split.train_fraction}, {"repeats", cfg.split.repeats}}},
        {"master_seed", cfg.master_seed},
        {"output_dir", cfg.output_dir}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    if (j.contains("input")) {
        const auto& input = j.at("input");
        if (input.contains("segments_csv")) {
            cfg.segments_csv = input.at("segments_csv").get<std::string>();
        } else if (input.contains("synth")) {
            const auto& synth = input.at("synth");
            const std::string kind = synth.value("kind", "turn");
            auto parsed = parse_kind(kind);
            if (!parsed) throw validation_error("UnknownKind", kind);
            cfg.synth_kind = *parsed;
            cfg.synth_per_class = synth.value("n_per_class", cfg.synth_per_class);
            cfg.synth_seed = synth.value("seed", cfg.synth_seed);
            cfg.segments_csv.clear();
        }
    }
    const std::string source = j.value("feature_source", "wavelet22");
    if (source == "wavelet22") {
        cfg.feature_source = FeatureSource::Wavelet22;
    } else if (source == "gaussian6") {
        cfg.feature_source = FeatureSource::Gaussian6;
    } else {
        throw validation_error("UnknownFeatureSource", source);
    }
    if (j.contains("selection")) {
        const auto& sel = j.at("selection");
        cfg.selection_enabled = sel.value("enabled", cfg.selection_enabled);
        cfg.selection_threshold = sel.value("threshold", cfg.selection_threshold);
        cfg.nca.lambda = sel.value("lambda", cfg.nca.lambda);
        cfg.nca.sigma = sel.value("sigma", cfg.nca.sigma);
        cfg.nca.lr = sel.value("lr", cfg.nca.lr);
        cfg.nca.max_iters = sel.value("max_iters", cfg.nca.max_iters);
        cfg.nca.seed = sel.value("seed", cfg.nca.seed);
    }
    if (j.contains("classifier")) {
        const auto& cls = j.at("classifier");
        cfg.algorithm = cls.value("algorithm", cfg.algorithm);
        if (cfg.algorithm != "mlp" && cfg.algorithm != "rbf" && cfg.algorithm != "svm") {
            throw validation_error("UnknownAlgorithm", cfg.algorithm);
        }
        cfg.mlp_hidden = cls.value("mlp_hidden", cfg.mlp_hidden);
        cfg.mlp_epochs = cls.value("mlp_epochs", cfg.mlp_epochs);
        cfg.mlp_lr = cls.value("mlp_lr", cfg.mlp_lr);
        cfg.rbf_k = cls.value("rbf_k", cfg.rbf_k);
        cfg.svm_kernel = cls.value("svm_kernel", cfg.svm_kernel);
        cfg.svm_c = cls.value("svm_c", cfg.svm_c);
        cfg.svm_gamma = cls.value("svm_gamma", cfg.svm_gamma);
    }
    if (j.contains("split")) {
        cfg.split.train_fraction = j.at("split").value("train_fraction", cfg.split.train_fraction);
        cfg.split.repeats = j.at("split").value("repeats", cfg.split.repeats);
    }
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
}

struct ExperimentRow {
    std::string label;       // table row label
    std::size_t param = 0;   // hidden count or k; 0 for svm
    MetricsReport metrics;
};

struct ExperimentResult {
    std::string config_hash;
    std::vector<std::size_t> selected_features;  // 1-based; empty if selection off
    std::vector<double> weights;
    bool selection_fell_back = false;
    std::vector<ExperimentRow> rows;
    bool all_converged = true;
    nlohmann::json metrics_json;
    std::string table_text;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string count_word(std::size_t n) {
    switch (n) {
        case 1: return "one";
        case 2: return "two";
        case 3: return "three";
        case 4: return "four";
        case 5: return "five";
        default: return std::to_string(n);
    }
}

inline std::string render_table(const std::string& algorithm, FeatureSource source,
                                const std::vector<ExperimentRow>& rows) {
    std::ostringstream out;
    const std::string features =
        source == FeatureSource::Wavelet22 ? "wavelet features" : "Gaussian function parameters";
    out << algorithm << " results (" << features << ")\n";
    const std::string head = algorithm == "svm" ? "Algorithm" : "Number of hidden neurons";
    std::size_t label_width = head.size();
    for (const auto& row : rows) label_width = std::max(label_width, row.label.size());
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size() + 3, ' ');
    };
    out << pad(head, label_width) << pad("True-positive rate", 18) << pad("Precision", 9) << "AUC\n";
    for (const auto& row : rows) {
        out << pad(row.label, label_width) << pad(fixed4(row.metrics.tpr), 18)
            << pad(fixed4(row.metrics.precision), 9) << fixed4(row.metrics.auc) << '\n';
    }
    return out.str();
}

}  // namespace detail

inline constexpr std::array<std::string_view, 6> kGaussianFeatureNames = {"a1", "b1", "c1",
                                                                          "a2", "b2", "c2"};

/// Runs extract -> (optional) select -> evaluate for every sweep row of the
/// configured classifier, returning the table plus a deterministic metrics
/// JSON document.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    // the experiment identity excludes the output location, so re-running a
    // persisted config into another directory reproduces the hash and reports
    nlohmann::json cfg_json = cfg;
    cfg_json.erase("output_dir");
    ExperimentResult result;
    result.config_hash = detail::fnv1a_hex(cfg_json.dump());

    std::vector<SensorSegment> segments = cfg.segments_csv.empty()
                                              ? generate_corpus(cfg.synth_kind, cfg.synth_per_class, cfg.synth_seed)
                                              : load_segments_file(cfg.segments_csv);

    const std::size_t dim = cfg.feature_source == FeatureSource::Wavelet22 ? kFeatureCount : 6;
    std::vector<std::vector<double>> raw;
    std::vector<int> labels;
    raw.reserve(segments.size());
    for (const auto& seg : segments) {
        if (seg.label == Label::Unlabeled) {
            throw validation_error("DegenerateDataset", "segment '" + seg.id + "' is unlabeled");
        }
        labels.push_back(seg.label == Label::Dangerous ? 1 : 0);
        if (cfg.feature_source == FeatureSource::Wavelet22) {
            const FeatureVector f = extract(seg);
            raw.emplace_back(f.v.begin(), f.v.end());
        } else {
            const auto g = gauss_features(seg);
            raw.emplace_back(g.begin(), g.end());
        }
    }
    LabeledDataset dataset(raw, labels);

    nlohmann::json selection_json{{"enabled", cfg.selection_enabled}};
    if (cfg.selection_enabled) {
        const FeatureWeights fw = nca_fit(dataset, cfg.nca);
        result.weights = fw.w;
        result.selected_features = select(fw, cfg.selection_threshold);
        result.selection_fell_back = result.selected_features.empty();
        if (result.selection_fell_back) {
            // nothing cleared the threshold: train on the full feature set
            result.selected_features.resize(dim);
            for (std::size_t i = 0; i < dim; ++i) result.selected_features[i] = i + 1;
        }
        dataset = dataset.restrict_columns(result.selected_features);
        selection_json["threshold"] = cfg.selection_threshold;
        selection_json["weights"] = fw.w;
        selection_json["selected"] = result.selected_features;
        selection_json["fallback_all"] = result.selection_fell_back;
        selection_json["objective_trace_len"] = fw.objective_trace.size();
        selection_json["converged"] = fw.converged;
    }

    std::vector<std::pair<std::string, ModelSpec>> sweep;
    if (cfg.algorithm == "mlp") {
        for (std::size_t h : cfg.mlp_hidden) {
            sweep.emplace_back(std::to_string(h), ModelSpec::make_mlp(h, cfg.mlp_epochs, cfg.mlp_lr));
        }
    } else if (cfg.algorithm == "rbf") {
        for (std::size_t k : cfg.rbf_k) {
            const std::string label = std::to_string(k) + " (" + detail::count_word(k / 2) + " neuron" +
                                      (k / 2 == 1 ? "" : "s") + " for each class)";
            sweep.emplace_back(label, ModelSpec::make_rbf(k));
        }
    } else {
        const SvmKernel kernel = cfg.svm_kernel == "linear" ? SvmKernel::Linear : SvmKernel::Gaussian;
        sweep.emplace_back("SVM", ModelSpec::make_svm(kernel, cfg.svm_c, cfg.svm_gamma));
    }

    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& [label, spec] : sweep) {
        ExperimentRow row;
        row.label = label;
        row.param = spec.algorithm == ModelSpec::Algorithm::Mlp   ? spec.mlp.hidden
                    : spec.algorithm == ModelSpec::Algorithm::Rbf ? spec.rbf.k
                                                                  : 0;
        row.metrics = evaluate(dataset, spec, SplitPlan{cfg.split.train_fraction, cfg.split.repeats,
                                                        cfg.master_seed});
        result.all_converged = result.all_converged && row.metrics.non_converged_trainings == 0;

        nlohmann::json per_repeat = nlohmann::json::array();
        for (const auto& m : row.metrics.per_repeat) {
            per_repeat.push_back({{"tpr", m.tpr}, {"precision", m.precision}, {"auc", m.auc}});
        }
        rows_json.push_back({{"param", row.param},
                             {"label", row.label},
                             {"tpr", row.metrics.tpr},
                             {"precision", row.metrics.precision},
                             {"auc", row.metrics.auc},
                             {"redrawn_splits", row.metrics.redrawn_splits},
                             {"non_converged_trainings", row.metrics.non_converged_trainings},
                             {"per_repeat", per_repeat}});
        result.rows.push_back(std::move(row));
    }

    result.metrics_json = {{"config_hash", result.config_hash},
                           {"config", cfg_json},
                           {"feature_source", std::string(to_string(cfg.feature_source))},
                           {"feature_names",
                            cfg.feature_source == FeatureSource::Wavelet22
                                ? nlohmann::json(kFeatureNames)
                                : nlohmann::json(kGaussianFeatureNames)},
                           {"selection", selection_json},
                           {"algorithm", cfg.algorithm},
                           {"rows", rows_json}};
    result.table_text = detail::render_table(cfg.algorithm, cfg.feature_source, result.rows);
    return result;
}

/// Writes metrics.json, table.txt and provenance.json under cfg.output_dir.
/// Only provenance.json carries the wall-clock timestamp, so the other two
/// are byte-identical across re-runs of the same config.
inline void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                                     const std::string& generated_at) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw io_error("FileOpen", "cannot create output dir '" + cfg.output_dir + "'");
    }
    auto write_file = [&](const std::string& name, const std::string& body) {
        std::ofstream out(fs::path(cfg.output_dir) / name, std::ios::binary);
        if (!out) {
            throw io_error("FileOpen", "cannot write '" + name + "' in '" + cfg.output_dir + "'");
        }
        out << body;
    };
    write_file("metrics.json", result.metrics_json.dump(2) + "\n");
    write_file("table.txt", result.table_text);
    const nlohmann::json provenance{{"config_hash", result.config_hash},
                                    {"master_seed", cfg.master_seed},
                                    {"library_version", std::string(kLibraryVersion)},
                                    {"compiler", std::string(__VERSION__)},
                                    {"generated_at", generated_at}};
    write_file("provenance.json", provenance.dump(2) + "\n");
}

}  // namespace drivestyle
