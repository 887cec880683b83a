#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "drivestyle/evaluate.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/metrics.hpp"
#include "drivestyle/mlp.hpp"
#include "drivestyle/rbf.hpp"
#include "drivestyle/rng.hpp"
#include "drivestyle/svm.hpp"

using namespace drivestyle;
using Catch::Approx;

namespace {

using Matrix = std::vector<std::vector<double>>;

// two gaussian blobs, class 0 around `center0`, class 1 around `center1`
LabeledDataset blob_dataset(std::size_t per_class, double center0, double center1, double noise,
                            std::uint64_t seed) {
    Rng rng(seed);
    Matrix raw;
    std::vector<int> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int y = i < per_class ? 0 : 1;
        const double c = y ? center1 : center0;
        raw.push_back({c + noise * rng.normal(), c + noise * rng.normal()});
        labels.push_back(y);
    }
    return LabeledDataset(raw, labels);
}

// class 0 on an inner ring, class 1 on an outer ring
LabeledDataset concentric_dataset(std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    Matrix raw;
    std::vector<int> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int y = i < per_class ? 0 : 1;
        const double radius = (y ? 3.0 : 1.0) + 0.15 * rng.normal();
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        raw.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        labels.push_back(y);
    }
    return LabeledDataset(raw, labels);
}

LabeledDataset xor_dataset(std::size_t copies, std::uint64_t seed) {
    Rng rng(seed);
    Matrix raw;
    std::vector<int> labels;
    const double corners[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    for (std::size_t rep = 0; rep < copies; ++rep) {
        for (int c = 0; c < 4; ++c) {
            raw.push_back({corners[c][0] + 0.05 * rng.normal(), corners[c][1] + 0.05 * rng.normal()});
            labels.push_back(c >= 2 ? 1 : 0);
        }
    }
    return LabeledDataset(raw, labels);
}

template <typename Model>
double train_accuracy(const Model& model, const LabeledDataset& ds) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        correct += (model.score(ds.point(i)) > 0.5 ? 1 : 0) == ds.label(i);
    }
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

// brute-force pairwise AUC; numerator kept integral so the final division is
// the only floating-point operation
double auc_brute_force(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::uint64_t concordant2 = 0;
    std::uint64_t n_pos = 0, n_neg = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (labels[p] != 1) continue;
        ++n_pos;
        for (std::size_t q = 0; q < scores.size(); ++q) {
            if (labels[q] == 1) continue;
            if (scores[p] > scores[q]) concordant2 += 2;
            else if (scores[p] == scores[q]) concordant2 += 1;
        }
    }
    for (int y : labels) n_neg += (y != 1);
    return static_cast<double>(concordant2) / static_cast<double>(2 * n_pos * n_neg);
}

// oracle for the SVM dual: projected gradient ascent with exact projection
// onto the box intersected with the equality constraint (bisection on the
// shift along y)
double projected_gradient_dual(const LabeledDataset& ds, const SvmModel& trained,
                               std::size_t iters = 60000) {
    const std::size_t n = ds.size();
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = ds.label(i) == 1 ? 1 : -1;
    double qmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            q[i][j] = y[i] * y[j] *
                      trained.kernel_value(ds.point(i), ds.point(j), ds.dim());
            qmax = std::max(qmax, std::abs(q[i][j]));
        }
    }
    const double C = trained.C;
    auto project = [&](std::vector<double>& alpha) {
        double lo = -10.0 * C, hi = 10.0 * C;
        for (int it = 0; it < 200; ++it) {
            const double nu = 0.5 * (lo + hi);
            double balance = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                balance += std::clamp(alpha[i] - nu * y[i], 0.0, C) * y[i];
            }
            (balance > 0.0 ? lo : hi) = nu;
        }
        const double nu = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < n; ++i) alpha[i] = std::clamp(alpha[i] - nu * y[i], 0.0, C);
    };

    std::vector<double> alpha(n, 0.0);
    project(alpha);
    const double step = 1.0 / (static_cast<double>(n) * qmax);
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double g = 1.0;
            for (std::size_t j = 0; j < n; ++j) g -= q[i][j] * alpha[j];
            next[i] = alpha[i] + step * g;
        }
        project(next);
        alpha = next;
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += alpha[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) obj -= 0.5 * alpha[i] * alpha[j] * q[i][j];
    }
    return obj;
}

}  // namespace

// --- kmeans ---------------------------------------------------------------

TEST_CASE("kmeans finds two tight blobs") {
    Rng rng(5);
    Matrix pts;
    for (std::size_t i = 0; i < 30; ++i) pts.push_back({0.3 * rng.normal(), 0.3 * rng.normal()});
    for (std::size_t i = 0; i < 30; ++i) {
        pts.push_back({10.0 + 0.3 * rng.normal(), 10.0 + 0.3 * rng.normal()});
    }
    const auto centers = kmeans(pts, 2, 1);
    REQUIRE(centers.size() == 2);
    const auto near = [](const std::vector<double>& c, double x) {
        return std::abs(c[0] - x) < 0.5 && std::abs(c[1] - x) < 0.5;
    };
    const bool ordered = near(centers[0], 0.0) && near(centers[1], 10.0);
    const bool swapped = near(centers[0], 10.0) && near(centers[1], 0.0);
    REQUIRE((ordered || swapped));
}

TEST_CASE("kmeans with k equal to the point count returns the points") {
    const Matrix pts = {{0.0, 0.0}, {1.0, 5.0}, {-2.0, 3.0}, {4.0, -1.0}};
    auto centers = kmeans(pts, pts.size(), 9);
    std::sort(centers.begin(), centers.end());
    Matrix expect = pts;
    std::sort(expect.begin(), expect.end());
    REQUIRE(centers == expect);
}

TEST_CASE("kmeans terminates on identical points") {
    const Matrix pts(8, {2.0, 2.0});
    const auto centers = kmeans(pts, 2, 3);
    REQUIRE(centers.size() == 2);
    for (const auto& c : centers) REQUIRE(c == std::vector<double>{2.0, 2.0});
}

TEST_CASE("kmeans rejects more clusters than points") {
    REQUIRE_THROWS_AS(kmeans({{1.0}, {2.0}}, 3, 0), Error);
}

// --- MLP --------------------------------------------------------------------

TEST_CASE("mlp solves the xor arrangement") {
    const LabeledDataset ds = xor_dataset(25, 31);
    MlpParams params;
    params.hidden = 4;
    params.epochs = 4000;
    params.lr = 1.0;
    params.seed = 2;
    const MlpModel model = train_mlp(ds, params);
    REQUIRE(train_accuracy(model, ds) >= 0.99);
}

TEST_CASE("mlp separates linear blobs with two hidden neurons") {
    const LabeledDataset ds = blob_dataset(60, 0.0, 3.0, 0.5, 12);
    const ModelSpec spec = ModelSpec::make_mlp(2);
    const MetricsReport report = evaluate(ds, spec, SplitPlan{0.7, 10, 21});
    REQUIRE(report.auc >= 0.99);
}

TEST_CASE("mlp rejects single-class training data") {
    const LabeledDataset ds = blob_dataset(10, 0.0, 3.0, 0.5, 12);
    std::vector<std::size_t> first_class;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.label(i) == 0) first_class.push_back(i);
    }
    REQUIRE_THROWS_AS(train_mlp(ds.subset_rows(first_class), MlpParams{}), Error);
}

TEST_CASE("mlp rejects hidden counts outside the sweep range") {
    const LabeledDataset ds = blob_dataset(10, 0.0, 3.0, 0.5, 12);
    MlpParams params;
    params.hidden = 7;
    REQUIRE_THROWS_AS(train_mlp(ds, params), Error);
}

TEST_CASE("mlp loss gradient matches central finite differences") {
    const LabeledDataset ds = blob_dataset(10, 0.0, 1.0, 0.8, 44);
    Rng rng(91);
    MlpModel model;
    model.input_dim = ds.dim();
    model.hidden_count = 3;
    model.w1.resize(model.hidden_count * model.input_dim);
    model.b1.resize(model.hidden_count);
    model.w2.resize(model.hidden_count);
    std::vector<double> p = model.flatten();
    for (double& v : p) v = rng.uniform(-1.0, 1.0);
    model.unflatten(p);

    const std::vector<double> analytic = mlp_loss_gradient(model, ds);
    const double h = 1e-6;
    for (std::size_t j = 0; j < p.size(); ++j) {
        MlpModel probe = model;
        std::vector<double> pp = p;
        pp[j] = p[j] + h;
        probe.unflatten(pp);
        const double above = mlp_loss(probe, ds);
        pp[j] = p[j] - h;
        probe.unflatten(pp);
        const double below = mlp_loss(probe, ds);
        const double numeric = (above - below) / (2.0 * h);
        REQUIRE(std::abs(analytic[j] - numeric) / std::max(1.0, std::abs(analytic[j])) < 1e-5);
    }
}

// --- RBF --------------------------------------------------------------------

TEST_CASE("rbf separates two blobs with one center per class") {
    const LabeledDataset ds = blob_dataset(40, 0.0, 4.0, 0.4, 6);
    RbfParams params;
    params.k = 2;
    const RbfModel model = train_rbf(ds, params);
    REQUIRE(train_accuracy(model, ds) >= 0.99);
}

TEST_CASE("rbf requires at least k points per class") {
    Matrix raw;
    std::vector<int> labels;
    Rng rng(2);
    for (std::size_t i = 0; i < 4; ++i) {
        raw.push_back({rng.normal(), rng.normal()});
        labels.push_back(0);
    }
    for (std::size_t i = 0; i < 12; ++i) {
        raw.push_back({3.0 + rng.normal(), 3.0 + rng.normal()});
        labels.push_back(1);
    }
    const LabeledDataset ds(raw, labels);
    RbfParams params;
    params.k = 6;
    REQUIRE_THROWS_AS(train_rbf(ds, params), Error);
}

TEST_CASE("rbf rejects odd k") {
    const LabeledDataset ds = blob_dataset(10, 0.0, 3.0, 0.4, 6);
    RbfParams params;
    params.k = 3;
    REQUIRE_THROWS_AS(train_rbf(ds, params), Error);
}

TEST_CASE("rbf beats a linear svm on concentric classes") {
    const LabeledDataset ds = concentric_dataset(60, 14);
    const SplitPlan plan{0.7, 10, 5};
    const MetricsReport rbf = evaluate(ds, ModelSpec::make_rbf(6), plan);
    const MetricsReport linear = evaluate(ds, ModelSpec::make_svm(SvmKernel::Linear), plan);
    REQUIRE(rbf.auc > linear.auc);
    REQUIRE(rbf.auc > 0.95);
}

// --- SVM --------------------------------------------------------------------

TEST_CASE("linear svm separates a trivial margin problem") {
    Matrix raw;
    std::vector<int> labels;
    for (int rep = 0; rep < 8; ++rep) {
        raw.push_back({0.0 + 0.01 * rep, 0.0});
        labels.push_back(0);
        raw.push_back({2.0 + 0.01 * rep, 2.0});
        labels.push_back(1);
    }
    const LabeledDataset ds(raw, labels);
    SvmParams params;
    params.kernel = SvmKernel::Linear;
    const SvmModel model = train_svm(ds, params);
    REQUIRE(model.converged);
    REQUIRE(train_accuracy(model, ds) == 1.0);

    // a point on the positive side of the midline classifies as dangerous
    std::vector<double> query = {1.0, 1.1};
    for (std::size_t r = 0; r < 2; ++r) {
        query[r] = (query[r] - ds.feature_mean()[r]) / ds.feature_stddev()[r];
    }
    REQUIRE(model.score(query.data()) > 0.5);
}

TEST_CASE("smo reaches the projected-gradient dual optimum on a small instance") {
    const LabeledDataset ds = blob_dataset(6, 0.0, 2.0, 0.7, 123);  // 12 points
    SvmParams params;
    params.kernel = SvmKernel::Gaussian;
    params.tol = 1e-4;
    const SvmModel model = train_svm(ds, params);
    const double smo_objective = svm_dual_objective(model);
    const double oracle = projected_gradient_dual(ds, model);
    REQUIRE(smo_objective == Approx(oracle).margin(1e-3));
}

TEST_CASE("gaussian svm fits concentric circles") {
    const LabeledDataset ds = concentric_dataset(50, 77);
    SvmParams params;
    params.kernel = SvmKernel::Gaussian;
    params.gamma = 1.0;
    const SvmModel model = train_svm(ds, params);
    REQUIRE(train_accuracy(model, ds) >= 0.99);
}

TEST_CASE("svm dual iterates stay feasible") {
    const LabeledDataset ds = blob_dataset(20, 0.0, 1.5, 0.8, 8);
    const SvmModel model = train_svm(ds, SvmParams{});
    double balance = 0.0;
    for (std::size_t i = 0; i < model.alphas.size(); ++i) {
        REQUIRE(model.alphas[i] >= 0.0);
        REQUIRE(model.alphas[i] <= model.C);
        balance += model.alphas[i] * model.train_y[i];
    }
    REQUIRE(std::abs(balance) < 1e-8);
}

// --- metrics ----------------------------------------------------------------

TEST_CASE("auc of perfectly ordered scores is one") {
    REQUIRE(auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
}

TEST_CASE("auc of constant scores is one half") {
    REQUIRE(auc({0.4, 0.4, 0.4, 0.4, 0.4}, {0, 1, 0, 1, 1}) == 0.5);
}

TEST_CASE("auc matches the six-pair hand count") {
    // positives {0.9, 0.8, 0.7}, negatives {0.75, 0.2}: 5 of 6 pairs concordant
    const std::vector<double> scores = {0.9, 0.8, 0.7, 0.75, 0.2};
    const std::vector<int> labels = {1, 1, 1, 0, 0};
    REQUIRE(auc(scores, labels) == Approx(5.0 / 6.0).margin(1e-15));
    REQUIRE(auc(scores, labels) == auc_brute_force(scores, labels));
}

TEST_CASE("auc equals brute-force pair counting exactly, ties included") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid forces plenty of ties
            scores[i] = static_cast<double>(rng.uniform_index(8)) / 8.0;
            labels[i] = rng.uniform() < 0.5 ? 0 : 1;
            (labels[i] ? pos : neg) = true;
        }
        if (!pos || !neg) continue;
        REQUIRE(auc(scores, labels) == auc_brute_force(scores, labels));
    }
}

TEST_CASE("auc is invariant under strictly monotone transforms") {
    Rng rng(66);
    std::vector<double> scores(30);
    std::vector<int> labels(30);
    for (std::size_t i = 0; i < 30; ++i) {
        scores[i] = static_cast<double>(rng.uniform_index(10)) / 10.0;
        labels[i] = i % 2;
    }
    std::vector<double> transformed(30);
    for (std::size_t i = 0; i < 30; ++i) transformed[i] = std::exp(3.0 * scores[i]) - 2.0;
    REQUIRE(auc(scores, labels) == auc(transformed, labels));
}

TEST_CASE("confusion counts cover the whole test set") {
    Rng rng(3);
    std::vector<double> scores(40);
    std::vector<int> labels(40);
    for (std::size_t i = 0; i < 40; ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.uniform() < 0.4 ? 1 : 0;
    }
    const Confusion c = confusion_at_half(scores, labels);
    REQUIRE(c.total() == 40);
}

// --- evaluate ----------------------------------------------------------------

TEST_CASE("evaluate is bit-reproducible") {
    const LabeledDataset ds = blob_dataset(30, 0.0, 2.0, 0.6, 19);
    const ModelSpec spec = ModelSpec::make_rbf(2);
    const SplitPlan plan{0.7, 20, 99};
    const MetricsReport a = evaluate(ds, spec, plan);
    const MetricsReport b = evaluate(ds, spec, plan);
    REQUIRE(a.per_repeat.size() == b.per_repeat.size());
    for (std::size_t i = 0; i < a.per_repeat.size(); ++i) {
        REQUIRE(a.per_repeat[i].tpr == b.per_repeat[i].tpr);
        REQUIRE(a.per_repeat[i].precision == b.per_repeat[i].precision);
        REQUIRE(a.per_repeat[i].auc == b.per_repeat[i].auc);
    }
}

TEST_CASE("degenerate splits are redrawn") {
    // 8 safe vs 2 dangerous in 10 points: a 3-point test set regularly misses
    // the dangerous class entirely
    Matrix raw;
    std::vector<int> labels;
    Rng rng(10);
    for (std::size_t i = 0; i < 10; ++i) {
        const int y = i < 8 ? 0 : 1;
        raw.push_back({(y ? 3.0 : 0.0) + 0.2 * rng.normal()});
        labels.push_back(y);
    }
    const LabeledDataset ds(raw, labels);
    const MetricsReport report =
        evaluate(ds, ModelSpec::make_mlp(2, 200, 0.5), SplitPlan{0.7, 50, 4});
    REQUIRE(report.per_repeat.size() == 50);
    REQUIRE(report.redrawn_splits >= 1);
    for (const auto& m : report.per_repeat) {
        REQUIRE(m.auc >= 0.0);
        REQUIRE(m.auc <= 1.0);
    }
}
