#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"

namespace drivestyle {

// Per-feature weights learned by neighborhood-component feature selection,
// together with the objective value of every accepted ascent step.
struct FeatureWeights {
    std::vector<double> w;
    std::vector<double> objective_trace;
    bool converged = true;  // false when max_iters ran out while still improving
};

struct NcaParams {
    double lambda = -1.0;   // regularization; < 0 means the 1/n default
    double sigma = 1.0;     // kernel width (features are standardized)
    double lr = 1.0;        // initial ascent step, adapted by step halving
    std::size_t max_iters = 100;
    std::uint64_t seed = 0;  // part of the determinism key; the full-batch
                             // ascent itself draws no random numbers
};

namespace detail {

// Row i workspace: stochastic-neighbor probabilities p_ij and the distance
// row, computed with a row-min shift so the softmax cannot underflow.
struct NcaRow {
    std::vector<double> p;   // p_ij over j (p_ii = 0)
    double p_same = 0.0;     // sum of p_ij over same-class j
};

inline NcaRow nca_row(const LabeledDataset& ds, const std::vector<double>& w, double sigma,
                      std::size_t i) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    std::vector<double> dist(n, 0.0);
    double row_min = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double acc = 0.0;
        const double* xi = ds.point(i);
        const double* xj = ds.point(j);
        for (std::size_t r = 0; r < d; ++r) {
            acc += w[r] * w[r] * std::abs(xi[r] - xj[r]);
        }
        dist[j] = acc;
        if (first || acc < row_min) {
            row_min = acc;
            first = false;
        }
    }
    NcaRow row;
    row.p.assign(n, 0.0);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        row.p[j] = std::exp(-(dist[j] - row_min) / sigma);
        z += row.p[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
        row.p[j] /= z;
        if (j != i && ds.label(j) == ds.label(i)) row.p_same += row.p[j];
    }
    return row;
}

}  // namespace detail

/// Leave-one-out stochastic nearest-neighbor objective
///   xi(w) = (1/n) sum_i p_i  -  lambda * sum_r w_r^2
/// with p_ij a softmax over the weighted L1 distances d_w(x_i, x_j)
/// = sum_r w_r^2 |x_ir - x_jr|.
inline double nca_objective(const LabeledDataset& ds, const std::vector<double>& w, double lambda,
                            double sigma) {
    const std::size_t n = ds.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += detail::nca_row(ds, w, sigma, i).p_same;
    }
    double reg = 0.0;
    for (double wr : w) reg += wr * wr;
    return total / static_cast<double>(n) - lambda * reg;
}

/// Analytic gradient of nca_objective:
///   d xi / d w_r = (2 w_r / sigma) (1/n) sum_i [ p_i * A_ir - B_ir ] - 2 lambda w_r
/// where A_ir = sum_k p_ik |x_ir - x_kr| and B_ir is the same sum over
/// same-class k only.
inline std::vector<double> nca_gradient(const LabeledDataset& ds, const std::vector<double>& w,
                                        double lambda, double sigma) {
    const std::size_t n = ds.size();
    const std::size_t d = ds.dim();
    std::vector<double> grad(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const detail::NcaRow row = detail::nca_row(ds, w, sigma, i);
        const double* xi = ds.point(i);
        for (std::size_t r = 0; r < d; ++r) {
            double all_term = 0.0, same_term = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i) continue;
                const double m = std::abs(xi[r] - ds.point(k)[r]);
                const double pm = row.p[k] * m;
                all_term += pm;
                if (ds.label(k) == ds.label(i)) same_term += pm;
            }
            grad[r] += row.p_same * all_term - same_term;
        }
    }
    for (std::size_t r = 0; r < d; ++r) {
        grad[r] = (2.0 * w[r] / sigma) * grad[r] / static_cast<double>(n) - 2.0 * lambda * w[r];
    }
    return grad;
}

/// Fits per-feature weights by gradient ascent with step-halving line search.
/// Negative components are clipped to zero after each step, so the returned
/// weights are nonnegative and objective_trace is nondecreasing.
inline FeatureWeights nca_fit(const LabeledDataset& ds, NcaParams params = {}) {
    if (!ds.has_both_classes()) {
        throw validation_error("DegenerateDataset", "nca_fit needs both classes");
    }
    const std::size_t d = ds.dim();
    const double lambda = params.lambda < 0.0 ? 1.0 / static_cast<double>(ds.size()) : params.lambda;

    FeatureWeights fw;
    fw.w.assign(d, 1.0 / std::sqrt(static_cast<double>(d)));
    double lr = params.lr;
    double objective = nca_objective(ds, fw.w, lambda, params.sigma);
    fw.objective_trace.push_back(objective);

    // relative objective gain below which an accepted step counts as converged
    constexpr double kFtol = 1e-6;

    std::vector<double> candidate(d);
    for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
        const std::vector<double> grad = nca_gradient(ds, fw.w, lambda, params.sigma);
        bool accepted = false;
        double gain = 0.0;
        for (int halving = 0; halving < 30; ++halving) {
            for (std::size_t r = 0; r < d; ++r) {
                candidate[r] = std::max(0.0, fw.w[r] + lr * grad[r]);
            }
            const double cand_objective = nca_objective(ds, candidate, lambda, params.sigma);
            if (cand_objective > objective) {
                gain = cand_objective - objective;
                fw.w = candidate;
                objective = cand_objective;
                fw.objective_trace.push_back(objective);
                if (halving == 0) lr *= 1.2;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) {
            // no ascent direction at any step size: stationary
            return fw;
        }
        const double scale = std::max(1.0, std::abs(objective));
        if (gain <= 1e-9 * scale) {
            return fw;  // clearly at stationarity
        }
        if (iter + 1 == params.max_iters) {
            fw.converged = gain <= kFtol * scale;
        }
    }
    return fw;
}

/// Verifies the analytic gradient against central finite differences;
/// returns max_r |analytic_r - numeric_r| / max(1, |analytic_r|).
inline double gradient_check(const LabeledDataset& ds, const std::vector<double>& w, double h,
                             double lambda, double sigma) {
    const std::vector<double> analytic = nca_gradient(ds, w, lambda, sigma);
    double worst = 0.0;
    std::vector<double> probe = w;
    for (std::size_t r = 0; r < w.size(); ++r) {
        probe[r] = w[r] + h;
        const double above = nca_objective(ds, probe, lambda, sigma);
        probe[r] = w[r] - h;
        const double below = nca_objective(ds, probe, lambda, sigma);
        probe[r] = w[r];
        const double numeric = (above - below) / (2.0 * h);
        const double err = std::abs(analytic[r] - numeric) / std::max(1.0, std::abs(analytic[r]));
        worst = std::max(worst, err);
    }
    return worst;
}

/// Indices (1-based, ascending) of features whose weight strictly exceeds the
/// threshold. An empty result means nothing cleared the bar; callers fall
/// back to the full feature set.
inline std::vector<std::size_t> select(const FeatureWeights& fw, double threshold = 0.1) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < fw.w.size(); ++r) {
        if (fw.w[r] > threshold) out.push_back(r + 1);
    }
    return out;
}

}  // namespace drivestyle
