#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/metrics.hpp"
#include "drivestyle/mlp.hpp"
#include "drivestyle/rbf.hpp"
#include "drivestyle/rng.hpp"
#include "drivestyle/svm.hpp"

namespace drivestyle {

// Repeated random-split protocol: train on 70%, score the held-out 30%,
// `repeats` times. Repeat r's split and training seeds derive from
// (master_seed, r), so results do not depend on evaluation order.
struct SplitPlan {
    double train_fraction = 0.70;
    std::size_t repeats = 100;
    std::uint64_t master_seed = 0;
};

struct ModelSpec {
    enum class Algorithm { Mlp, Rbf, Svm };
    Algorithm algorithm = Algorithm::Mlp;
    MlpParams mlp;
    RbfParams rbf;
    SvmParams svm;

    static ModelSpec make_mlp(std::size_t hidden, std::size_t epochs = 2000, double lr = 0.5) {
        ModelSpec spec;
        spec.algorithm = Algorithm::Mlp;
        spec.mlp.hidden = hidden;
        spec.mlp.epochs = epochs;
        spec.mlp.lr = lr;
        return spec;
    }
    static ModelSpec make_rbf(std::size_t k) {
        ModelSpec spec;
        spec.algorithm = Algorithm::Rbf;
        spec.rbf.k = k;
        return spec;
    }
    static ModelSpec make_svm(SvmKernel kernel = SvmKernel::Gaussian, double C = 1.0, double gamma = -1.0) {
        ModelSpec spec;
        spec.algorithm = Algorithm::Svm;
        spec.svm.kernel = kernel;
        spec.svm.C = C;
        spec.svm.gamma = gamma;
        return spec;
    }
};

namespace detail {

struct TrainedModel {
    std::variant<MlpModel, RbfModel, SvmModel> model;
    bool converged = true;

    double score(const double* x) const {
        return std::visit([&](const auto& m) { return m.score(x); }, model);
    }
};

inline TrainedModel train_model(const LabeledDataset& train, const ModelSpec& spec, std::uint64_t seed) {
    TrainedModel out;
    switch (spec.algorithm) {
        case ModelSpec::Algorithm::Mlp: {
            MlpParams p = spec.mlp;
            p.seed = seed;
            out.model = train_mlp(train, p);
            break;
        }
        case ModelSpec::Algorithm::Rbf: {
            RbfParams p = spec.rbf;
            p.seed = seed;
            out.model = train_rbf(train, p);
            break;
        }
        case ModelSpec::Algorithm::Svm: {
            SvmParams p = spec.svm;
            p.seed = seed;
            SvmModel m = train_svm(train, p);
            out.converged = m.converged;
            out.model = std::move(m);
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Runs the repeated-split protocol and reports mean TPR, precision (both at
/// the 0.5 threshold) and AUC, plus the per-repeat values. A draw whose train
/// or test side is single-class is redrawn from a derived sub-seed (and
/// counted in redrawn_splits); the evaluation is fully deterministic given
/// (dataset, spec, plan).
inline MetricsReport evaluate(const LabeledDataset& dataset, const ModelSpec& spec, const SplitPlan& plan) {
    if (!dataset.has_both_classes()) {
        throw validation_error("DegenerateDataset", "evaluate needs both classes");
    }
    const std::size_t n = dataset.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(plan.train_fraction * static_cast<double>(n)));
    n_train = std::min(std::max<std::size_t>(n_train, 1), n - 1);

    MetricsReport report;
    report.per_repeat.reserve(plan.repeats);
    for (std::size_t r = 0; r < plan.repeats; ++r) {
        const std::uint64_t repeat_seed = derive_seed(plan.master_seed, r);

        std::vector<std::size_t> train_rows, test_rows;
        bool ok = false;
        for (std::size_t attempt = 0; attempt < 100 && !ok; ++attempt) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            Rng rng(derive_seed(repeat_seed, attempt));
            rng.shuffle(order);
            train_rows.assign(order.begin(), order.begin() + n_train);
            test_rows.assign(order.begin() + n_train, order.end());

            auto both = [&](const std::vector<std::size_t>& rows) {
                bool pos = false, neg = false;
                for (std::size_t i : rows) (dataset.label(i) == 1 ? pos : neg) = true;
                return pos && neg;
            };
            ok = both(train_rows) && both(test_rows);
            if (!ok && attempt == 0) ++report.redrawn_splits;
        }
        if (!ok) {
            throw validation_error("DegenerateSplit",
                                   "repeat " + std::to_string(r) + ": no two-class split in 100 draws");
        }

        const LabeledDataset train = dataset.subset_rows(train_rows);
        const detail::TrainedModel model = detail::train_model(train, spec, derive_seed(repeat_seed, 7777));
        if (!model.converged) ++report.non_converged_trainings;

        std::vector<double> scores;
        std::vector<int> labels;
        scores.reserve(test_rows.size());
        for (std::size_t i : test_rows) {
            scores.push_back(model.score(dataset.point(i)));
            labels.push_back(dataset.label(i));
        }
        const Confusion c = confusion_at_half(scores, labels);
        report.per_repeat.push_back({c.tpr(), c.precision(), auc(scores, labels)});
    }
    report.finalize();
    return report;
}

}  // namespace drivestyle
