// Command-line surface for the maneuver-classification pipeline. Subcommands
// mirror the pipeline stages so every intermediate artifact can be written to
// and read back from disk:
//
//   synth    generate a labeled synthetic maneuver corpus (CSV)
//   extract  segments CSV -> 22-component feature matrix (CSV or JSON)
//   select   feature matrix -> per-feature weights + selected indices (JSON)
//   train    feature matrix -> one trained model (JSON)
//   eval     feature matrix -> repeated-split metrics for one model spec
//   rule     segments CSV -> braking/gas threshold verdicts (JSON)
//   fit      segments CSV -> two-Gaussian fit parameters (JSON or CSV)
//   report   config-driven end-to-end run writing metrics/table/provenance
//
// Exit codes: 0 ok, 2 validation error, 3 non-convergence (outputs are still
// written), 4 I/O error.

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "drivestyle/drivestyle.hpp"
#include "drivestyle/json_io.hpp"

namespace ds = drivestyle;

namespace {

int exit_code(const ds::Error& e) {
    switch (e.kind()) {
        case ds::errc::validation: return 2;
        case ds::errc::numeric: return 3;
        case ds::errc::io: return 4;
    }
    return 1;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ds::io_error("FileOpen", "cannot open '" + path + "' for writing");
    out << body;
}

ds::LabeledDataset dataset_from_matrix(const ds::FeatureMatrix& fm) {
    std::vector<int> labels;
    labels.reserve(fm.labels.size());
    for (std::size_t i = 0; i < fm.labels.size(); ++i) {
        if (fm.labels[i] == ds::Label::Unlabeled) {
            throw ds::validation_error("DegenerateDataset", "segment '" + fm.ids[i] + "' is unlabeled");
        }
        labels.push_back(fm.labels[i] == ds::Label::Dangerous ? 1 : 0);
    }
    return ds::LabeledDataset(fm.rows, labels);
}

struct ClassifierFlags {
    std::string algorithm = "mlp";
    std::size_t hidden = 4;
    std::size_t epochs = 2000;
    double lr = 0.5;
    std::size_t k = 2;
    std::string kernel = "gaussian";
    double C = 1.0;
    double gamma = -1.0;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--algorithm", algorithm, "mlp | rbf | svm")
            ->check(CLI::IsMember({"mlp", "rbf", "svm"}));
        cmd->add_option("--hidden", hidden, "MLP hidden neurons (2..6)");
        cmd->add_option("--epochs", epochs, "MLP training epochs");
        cmd->add_option("--lr", lr, "MLP learning rate");
        cmd->add_option("--k", k, "RBF hidden units (even)");
        cmd->add_option("--kernel", kernel, "SVM kernel: gaussian | linear")
            ->check(CLI::IsMember({"gaussian", "linear"}));
        cmd->add_option("--svm-c", C, "SVM box constraint");
        cmd->add_option("--gamma", gamma, "SVM gaussian kernel gamma (<0: 1/dim)");
        cmd->add_option("--seed", seed, "training seed");
    }

    ds::ModelSpec spec() const {
        if (algorithm == "mlp") return ds::ModelSpec::make_mlp(hidden, epochs, lr);
        if (algorithm == "rbf") return ds::ModelSpec::make_rbf(k);
        return ds::ModelSpec::make_svm(kernel == "linear" ? ds::SvmKernel::Linear : ds::SvmKernel::Gaussian,
                                       C, gamma);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driving-maneuver classification pipeline"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled maneuver corpus");
    std::string synth_kind = "turn";
    std::size_t synth_n = 40;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "segments.csv";
    synth->add_option("--kind", synth_kind, "turn | uturn | lane_change | brake | gas")
        ->check(CLI::IsMember({"turn", "uturn", "lane_change", "brake", "gas"}));
    synth->add_option("--n", synth_n, "segments per class");
    synth->add_option("--seed", synth_seed, "master seed");
    synth->add_option("--out", synth_out, "output segments CSV");

    // --- extract ---
    auto* extract = app.add_subcommand("extract", "extract the 22-component feature matrix");
    std::string extract_in, extract_out = "features.csv", extract_format = "csv";
    extract->add_option("--in", extract_in, "segments CSV")->required();
    extract->add_option("--out", extract_out, "output path");
    extract->add_option("--format", extract_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    // --- select ---
    auto* selectc = app.add_subcommand("select", "learn feature weights and select features");
    std::string select_in, select_out = "weights.json";
    double sel_lambda = -1.0, sel_sigma = 1.0, sel_lr = 1.0, sel_threshold = 0.1;
    std::size_t sel_iters = 100;
    std::uint64_t sel_seed = 0;
    selectc->add_option("--in", select_in, "feature matrix CSV")->required();
    selectc->add_option("--out", select_out, "output weights JSON");
    selectc->add_option("--lambda", sel_lambda, "regularization (<0: 1/n)");
    selectc->add_option("--sigma", sel_sigma, "kernel width");
    selectc->add_option("--lr", sel_lr, "initial ascent step");
    selectc->add_option("--max-iters", sel_iters, "iteration cap");
    selectc->add_option("--threshold", sel_threshold, "selection threshold");
    selectc->add_option("--seed", sel_seed, "seed");

    // --- train ---
    auto* train = app.add_subcommand("train", "train one model on the full feature matrix");
    std::string train_in, train_out = "model.json";
    ClassifierFlags train_flags;
    train->add_option("--in", train_in, "feature matrix CSV")->required();
    train->add_option("--out", train_out, "output model JSON");
    train_flags.attach(train);

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "repeated-split evaluation of one model spec");
    std::string eval_in, eval_out;
    ClassifierFlags eval_flags;
    double eval_fraction = 0.70;
    std::size_t eval_repeats = 100;
    eval->add_option("--in", eval_in, "feature matrix CSV")->required();
    eval->add_option("--out", eval_out, "metrics JSON path (default: stdout)");
    eval->add_option("--train-fraction", eval_fraction, "train split fraction");
    eval->add_option("--repeats", eval_repeats, "number of random splits");
    eval_flags.attach(eval);

    // --- rule ---
    auto* rule = app.add_subcommand("rule", "threshold verdicts for brake/gas segments");
    std::string rule_in, rule_out;
    ds::BrakeThresholds thresholds;
    rule->add_option("--in", rule_in, "segments CSV")->required();
    rule->add_option("--out", rule_out, "verdicts JSON path (default: stdout)");
    rule->add_option("--theta-vs", thresholds.very_safe, "very-safe threshold, m/s^2");
    rule->add_option("--theta-d", thresholds.dangerous, "dangerous threshold, m/s^2");
    rule->add_option("--window", thresholds.window_s, "window length, seconds");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "two-Gaussian curve fit of the steering channel");
    std::string fit_in, fit_out, fit_format = "json";
    fit->add_option("--in", fit_in, "segments CSV")->required();
    fit->add_option("--out", fit_out, "output path (default: stdout)");
    fit->add_option("--format", fit_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    // --- report ---
    auto* report = app.add_subcommand("report", "config-driven end-to-end experiment");
    std::string report_config;
    std::string report_out_dir, report_algorithm, report_source;
    std::int64_t report_seed = -1;
    std::int64_t report_repeats = -1;
    bool report_no_selection = false;
    report->add_option("--config", report_config, "experiment config JSON");
    report->add_option("--out-dir", report_out_dir, "override output directory");
    report->add_option("--algorithm", report_algorithm, "override classifier algorithm")
        ->check(CLI::IsMember({"mlp", "rbf", "svm"}));
    report->add_option("--feature-source", report_source, "override: wavelet22 | gaussian6")
        ->check(CLI::IsMember({"wavelet22", "gaussian6"}));
    report->add_option("--seed", report_seed, "override master seed");
    report->add_option("--repeats", report_repeats, "override split repeats");
    report->add_flag("--no-selection", report_no_selection, "disable feature selection");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const auto kind = *ds::parse_kind(synth_kind);
            const auto corpus = ds::generate_corpus(kind, synth_n, synth_seed);
            ds::save_segments_file(synth_out, corpus);
            std::cout << "wrote " << corpus.size() << " segments to " << synth_out << "\n";
        } else if (*extract) {
            const auto segments = ds::load_segments_file(extract_in);
            const auto rows = ds::extract_all(segments);
            if (extract_format == "csv") {
                std::ofstream out(extract_out, std::ios::binary);
                if (!out) throw ds::io_error("FileOpen", "cannot write '" + extract_out + "'");
                ds::save_features_csv(out, rows);
            } else {
                ds::write_json_file(extract_out, ds::features_to_json(rows));
            }
            std::cout << "wrote " << rows.size() << " feature rows to " << extract_out << "\n";
        } else if (*selectc) {
            const auto fm = ds::load_feature_matrix_file(select_in);
            const auto dataset = dataset_from_matrix(fm);
            ds::NcaParams params;
            params.lambda = sel_lambda;
            params.sigma = sel_sigma;
            params.lr = sel_lr;
            params.max_iters = sel_iters;
            params.seed = sel_seed;
            const auto fw = ds::nca_fit(dataset, params);
            ds::write_json_file(select_out, ds::weights_to_json(fw, sel_threshold));
            std::cout << "wrote weights to " << select_out << "\n";
            if (!fw.converged) {
                std::cerr << "warning: weight ascent hit the iteration cap while still improving\n";
                return 3;
            }
        } else if (*train) {
            const auto fm = ds::load_feature_matrix_file(train_in);
            const auto dataset = dataset_from_matrix(fm);
            nlohmann::json model_json;
            bool converged = true;
            if (train_flags.algorithm == "mlp") {
                ds::MlpParams p{train_flags.hidden, train_flags.epochs, train_flags.lr, train_flags.seed};
                model_json = ds::model_to_json(ds::train_mlp(dataset, p));
            } else if (train_flags.algorithm == "rbf") {
                ds::RbfParams p;
                p.k = train_flags.k;
                p.seed = train_flags.seed;
                model_json = ds::model_to_json(ds::train_rbf(dataset, p));
            } else {
                ds::SvmParams p;
                p.kernel = train_flags.kernel == "linear" ? ds::SvmKernel::Linear : ds::SvmKernel::Gaussian;
                p.C = train_flags.C;
                p.gamma = train_flags.gamma;
                p.seed = train_flags.seed;
                const auto model = ds::train_svm(dataset, p);
                converged = model.converged;
                model_json = ds::model_to_json(model);
            }
            ds::write_json_file(train_out, model_json);
            std::cout << "wrote model to " << train_out << "\n";
            if (!converged) {
                std::cerr << "warning: training stopped at the pass limit before reaching KKT tolerance\n";
                return 3;
            }
        } else if (*eval) {
            const auto fm = ds::load_feature_matrix_file(eval_in);
            const auto dataset = dataset_from_matrix(fm);
            const ds::SplitPlan plan{eval_fraction, eval_repeats, eval_flags.seed};
            const auto metrics = ds::evaluate(dataset, eval_flags.spec(), plan);
            nlohmann::json j{{"tpr", metrics.tpr},
                             {"precision", metrics.precision},
                             {"auc", metrics.auc},
                             {"repeats", metrics.per_repeat.size()},
                             {"redrawn_splits", metrics.redrawn_splits},
                             {"non_converged_trainings", metrics.non_converged_trainings}};
            if (eval_out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                ds::write_json_file(eval_out, j);
                std::cout << "wrote metrics to " << eval_out << "\n";
            }
            if (metrics.non_converged_trainings > 0) return 3;
        } else if (*rule) {
            const auto segments = ds::load_segments_file(rule_in);
            nlohmann::json out = nlohmann::json::array();
            for (const auto& seg : segments) {
                out.push_back(ds::verdict_to_json(seg, ds::classify_braking(seg, thresholds)));
            }
            if (rule_out.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                ds::write_json_file(rule_out, out);
                std::cout << "wrote " << out.size() << " verdicts to " << rule_out << "\n";
            }
        } else if (*fit) {
            const auto segments = ds::load_segments_file(fit_in);
            bool all_converged = true;
            if (fit_format == "json") {
                nlohmann::json out = nlohmann::json::array();
                for (const auto& seg : segments) {
                    std::vector<double> ts;
                    ts.reserve(seg.samples.size());
                    for (const auto& s : seg.samples) ts.push_back(s.t);
                    const auto f = ds::fit_two_gaussians(ts, ds::channel_gz(seg));
                    all_converged = all_converged && f.converged;
                    out.push_back(ds::fit_to_json(seg, f));
                }
                if (fit_out.empty()) {
                    std::cout << out.dump(2) << "\n";
                } else {
                    ds::write_json_file(fit_out, out);
                }
            } else {
                std::ostringstream out;
                out << "segment_id,label,a1,b1,c1,a2,b2,c2\n";
                for (const auto& seg : segments) {
                    const auto g = ds::gauss_features(seg);
                    out << seg.id << ',' << ds::to_string(seg.label);
                    for (double v : g) out << ',' << ds::detail::format_double(v);
                    out << '\n';
                }
                if (fit_out.empty()) {
                    std::cout << out.str();
                } else {
                    write_text_file(fit_out, out.str());
                }
            }
            if (!all_converged) {
                std::cerr << "warning: at least one fit returned best-so-far parameters\n";
                return 3;
            }
        } else if (*report) {
            ds::ExperimentConfig cfg;
            if (!report_config.empty()) {
                std::ifstream in(report_config);
                if (!in) throw ds::io_error("FileOpen", "cannot open '" + report_config + "'");
                nlohmann::json j;
                in >> j;
                cfg = j.get<ds::ExperimentConfig>();
            }
            // flags override config-file values
            if (!report_out_dir.empty()) cfg.output_dir = report_out_dir;
            if (!report_algorithm.empty()) cfg.algorithm = report_algorithm;
            if (!report_source.empty()) {
                cfg.feature_source = report_source == "wavelet22" ? ds::FeatureSource::Wavelet22
                                                                  : ds::FeatureSource::Gaussian6;
            }
            if (report_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(report_seed);
            if (report_repeats >= 0) cfg.split.repeats = static_cast<std::size_t>(report_repeats);
            if (report_no_selection) cfg.selection_enabled = false;

            const auto result = ds::run_experiment(cfg);
            ds::write_experiment_outputs(cfg, result, now_iso8601());
            if (result.selection_fell_back) {
                std::cerr << "warning: no feature cleared the selection threshold; using all features\n";
            }
            std::cout << result.table_text;
            std::cout << "reports written to " << cfg.output_dir << "\n";
            if (!result.all_converged) {
                std::cerr << "warning: some trainings did not converge; results flagged in metrics.json\n";
                return 3;
            }
        }
    } catch (const ds::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
