#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

// Single-hidden-layer perceptron, logistic activations on both layers,
// trained full-batch on mean cross-entropy.
struct MlpModel {
    std::size_t input_dim = 0;
    std::size_t hidden_count = 0;
    std::vector<double> w1;  // hidden x input, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;

    /// Positive-class score in (0, 1).
    double score(const double* x) const {
        double out = b2;
        for (std::size_t h = 0; h < hidden_count; ++h) {
            double z = b1[h];
            for (std::size_t r = 0; r < input_dim; ++r) z += w1[h * input_dim + r] * x[r];
            out += w2[h] / (1.0 + std::exp(-z));
        }
        return 1.0 / (1.0 + std::exp(-out));
    }

    std::size_t parameter_count() const { return hidden_count * (input_dim + 2) + 1; }

    std::vector<double> flatten() const {
        std::vector<double> p;
        p.reserve(parameter_count());
        p.insert(p.end(), w1.begin(), w1.end());
        p.insert(p.end(), b1.begin(), b1.end());
        p.insert(p.end(), w2.begin(), w2.end());
        p.push_back(b2);
        return p;
    }

    void unflatten(const std::vector<double>& p) {
        std::size_t at = 0;
        for (double& v : w1) v = p[at++];
        for (double& v : b1) v = p[at++];
        for (double& v : w2) v = p[at++];
        b2 = p[at];
    }
};

struct MlpParams {
    std::size_t hidden = 4;
    std::size_t epochs = 2000;
    double lr = 0.5;
    std::uint64_t seed = 0;
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// clamp to keep log() finite in the loss
inline double clamp_prob(double p) { return std::min(1.0 - 1e-12, std::max(1e-12, p)); }

}  // namespace detail

/// Mean cross-entropy of the model over the dataset.
inline double mlp_loss(const MlpModel& model, const LabeledDataset& ds) {
    double loss = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double s = detail::clamp_prob(model.score(ds.point(i)));
        loss += ds.label(i) ? -std::log(s) : -std::log(1.0 - s);
    }
    return loss / static_cast<double>(ds.size());
}

/// Full-batch gradient of mlp_loss in flatten() order.
inline std::vector<double> mlp_loss_gradient(const MlpModel& model, const LabeledDataset& ds) {
    const std::size_t d = model.input_dim;
    const std::size_t h_count = model.hidden_count;
    std::vector<double> g_w1(d * h_count, 0.0), g_b1(h_count, 0.0), g_w2(h_count, 0.0);
    double g_b2 = 0.0;
    std::vector<double> hidden(h_count, 0.0);

    const double inv_n = 1.0 / static_cast<double>(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* x = ds.point(i);
        double out = model.b2;
        for (std::size_t h = 0; h < h_count; ++h) {
            double z = model.b1[h];
            for (std::size_t r = 0; r < d; ++r) z += model.w1[h * d + r] * x[r];
            hidden[h] = detail::sigmoid(z);
            out += model.w2[h] * hidden[h];
        }
        const double s = detail::sigmoid(out);
        // d(cross-entropy)/d(out) for a logistic output
        const double delta = (s - static_cast<double>(ds.label(i))) * inv_n;
        g_b2 += delta;
        for (std::size_t h = 0; h < h_count; ++h) {
            g_w2[h] += delta * hidden[h];
            const double dh = delta * model.w2[h] * hidden[h] * (1.0 - hidden[h]);
            g_b1[h] += dh;
            for (std::size_t r = 0; r < d; ++r) g_w1[h * d + r] += dh * x[r];
        }
    }
    std::vector<double> grad;
    grad.reserve(model.parameter_count());
    grad.insert(grad.end(), g_w1.begin(), g_w1.end());
    grad.insert(grad.end(), g_b1.begin(), g_b1.end());
    grad.insert(grad.end(), g_w2.begin(), g_w2.end());
    grad.push_back(g_b2);
    return grad;
}

/// Trains by full-batch gradient descent with a fixed learning rate.
/// hidden must lie in the supported sweep range 2..6.
inline MlpModel train_mlp(const LabeledDataset& train, MlpParams params = {}) {
    if (!train.has_both_classes()) {
        throw validation_error("DegenerateDataset", "train_mlp needs both classes");
    }
    if (params.hidden < 2 || params.hidden > 6) {
        throw validation_error("BadHiddenCount",
                               "hidden neuron count must be in 2..6, got " + std::to_string(params.hidden));
    }
    MlpModel model;
    model.input_dim = train.dim();
    model.hidden_count = params.hidden;
    model.w1.assign(model.hidden_count * model.input_dim, 0.0);
    model.b1.assign(model.hidden_count, 0.0);
    model.w2.assign(model.hidden_count, 0.0);

    Rng rng(params.seed);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(model.input_dim));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(model.hidden_count));
    for (double& v : model.w1) v = rng.uniform(-a1, a1);
    for (double& v : model.b1) v = rng.uniform(-a1, a1);
    for (double& v : model.w2) v = rng.uniform(-a2, a2);
    model.b2 = rng.uniform(-a2, a2);

    std::vector<double> p = model.flatten();
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const std::vector<double> grad = mlp_loss_gradient(model, train);
        for (std::size_t j = 0; j < p.size(); ++j) p[j] -= params.lr * grad[j];
        model.unflatten(p);
    }
    return model;
}

}  // namespace drivestyle
