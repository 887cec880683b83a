#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

// Gaussian-unit network: k/2 k-means centers per class, per-center widths
// from the nearest-other-center distance, linear output layer solved by
// regularized least squares against 0/1 targets.
struct RbfModel {
    std::vector<std::vector<double>> centers;
    std::vector<double> widths;
    std::vector<double> output_weights;  // one per center
    double output_bias = 0.0;

    double score(const double* x) const {
        double out = output_bias;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            out += output_weights[c] * unit(c, x);
        }
        return out;
    }

    double unit(std::size_t c, const double* x) const {
        double d2 = 0.0;
        for (std::size_t r = 0; r < centers[c].size(); ++r) {
            const double d = x[r] - centers[c][r];
            d2 += d * d;
        }
        return std::exp(-d2 / (2.0 * widths[c] * widths[c]));
    }
};

struct RbfParams {
    std::size_t k = 2;  // total hidden units, half per class
    std::uint64_t seed = 0;
    double ridge = 1e-6;  // output-layer regularization
};

/// Trains the RBF network. k must be even (k/2 centers per class) and every
/// class must contribute at least k points.
inline RbfModel train_rbf(const LabeledDataset& train, RbfParams params = {}) {
    if (!train.has_both_classes()) {
        throw validation_error("DegenerateDataset", "train_rbf needs both classes");
    }
    if (params.k < 2 || params.k % 2 != 0) {
        throw validation_error("BadCenterCount", "k must be even and >= 2, got " + std::to_string(params.k));
    }
    const std::size_t per_class = params.k / 2;
    for (int cls : {0, 1}) {
        if (train.count_class(cls) < params.k) {
            throw validation_error("DegenerateDataset",
                                   "class " + std::to_string(cls) + " has " +
                                       std::to_string(train.count_class(cls)) + " points, need >= " +
                                       std::to_string(params.k) + " for k=" + std::to_string(params.k));
        }
    }

    RbfModel model;
    for (int cls : {0, 1}) {
        std::vector<std::vector<double>> pts;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (train.label(i) == cls) {
                pts.emplace_back(train.point(i), train.point(i) + train.dim());
            }
        }
        auto centers = kmeans(pts, per_class, derive_seed(params.seed, static_cast<std::uint64_t>(cls)));
        for (auto& c : centers) model.centers.push_back(std::move(c));
    }

    // width = distance to the nearest other center; degenerate (zero)
    // distances fall back to the mean nearest-other distance, then to 1
    const std::size_t k = model.centers.size();
    std::vector<double> nearest(k, 0.0);
    double mean_nearest = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t c = 0; c < k; ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            best = std::min(best, std::sqrt(detail::squared_distance(model.centers[c], model.centers[o])));
        }
        nearest[c] = best;
        if (best > 0.0) {
            mean_nearest += best;
            ++nonzero;
        }
    }
    mean_nearest = nonzero ? mean_nearest / static_cast<double>(nonzero) : 1.0;
    model.widths.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        model.widths[c] = nearest[c] > 0.0 ? nearest[c] : mean_nearest;
    }

    // linear output layer: (Phi^T Phi + ridge I) w = Phi^T y
    const std::size_t n = train.size();
    Eigen::MatrixXd phi(n, k + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) {
            phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                model.unit(c, train.point(i));
        }
        phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = 1.0;
        y(static_cast<Eigen::Index>(i)) = static_cast<double>(train.label(i));
    }
    Eigen::MatrixXd gram = phi.transpose() * phi;
    gram.diagonal().array() += params.ridge;
    Eigen::VectorXd w = gram.ldlt().solve(phi.transpose() * y);

    model.output_weights.resize(k);
    for (std::size_t c = 0; c < k; ++c) model.output_weights[c] = w(static_cast<Eigen::Index>(c));
    model.output_bias = w(static_cast<Eigen::Index>(k));
    return model;
}

}  // namespace drivestyle
