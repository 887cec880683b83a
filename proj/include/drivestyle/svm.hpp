#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "drivestyle/dataset.hpp"
#include "drivestyle/error.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

enum class SvmKernel { Linear, Gaussian };

struct SvmParams {
    SvmKernel kernel = SvmKernel::Gaussian;
    double gamma = -1.0;  // < 0 means the 1/dim default
    double C = 1.0;
    double tol = 1e-3;    // KKT tolerance
    std::uint64_t seed = 0;
    std::size_t max_passes = 200;  // outer loops before flagging non-convergence
};

// Soft-margin binary SVM in the dual. Dangerous maps to +1. The full alpha
// vector is kept (training sets are small) so dual feasibility is checkable.
struct SvmModel {
    SvmKernel kernel = SvmKernel::Gaussian;
    double gamma = 0.0;
    double C = 1.0;
    double bias = 0.0;
    std::vector<std::vector<double>> train_x;  // standardized training points
    std::vector<int> train_y;                  // -1 / +1
    std::vector<double> alphas;
    bool converged = true;

    double kernel_value(const double* a, const double* b, std::size_t dim) const {
        if (kernel == SvmKernel::Linear) {
            double dot = 0.0;
            for (std::size_t r = 0; r < dim; ++r) dot += a[r] * b[r];
            return dot;
        }
        double d2 = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            const double d = a[r] - b[r];
            d2 += d * d;
        }
        return std::exp(-gamma * d2);
    }

    /// Decision value sum_i alpha_i y_i K(x_i, x) + b.
    double decision(const double* x) const {
        double f = bias;
        const std::size_t dim = train_x.empty() ? 0 : train_x.front().size();
        for (std::size_t i = 0; i < train_x.size(); ++i) {
            if (alphas[i] > 0.0) {
                f += alphas[i] * train_y[i] * kernel_value(train_x[i].data(), x, dim);
            }
        }
        return f;
    }

    /// Positive-class score: logistic squash of the decision value, so the
    /// usual 0.5 threshold sits on the separating surface.
    double score(const double* x) const { return 1.0 / (1.0 + std::exp(-decision(x))); }
};

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double svm_dual_objective(const SvmModel& model) {
    const std::size_t n = model.alphas.size();
    const std::size_t dim = model.train_x.empty() ? 0 : model.train_x.front().size();
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += model.alphas[i];
    for (std::size_t i = 0; i < n; ++i) {
        if (model.alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (model.alphas[j] == 0.0) continue;
            obj -= 0.5 * model.alphas[i] * model.alphas[j] * model.train_y[i] * model.train_y[j] *
                   model.kernel_value(model.train_x[i].data(), model.train_x[j].data(), dim);
        }
    }
    return obj;
}

namespace detail {

// SMO working state: kernel matrix plus an f(x_i) cache kept incrementally
// up to date as pairs of multipliers move.
struct SmoState {
    const std::vector<int>& y;
    std::vector<double>& alphas;
    double& b;
    const std::vector<std::vector<double>>& K;
    std::vector<double> f;  // current decision values on the training set
    double C;
    double tol;
    static constexpr double kEps = 1e-12;

    double error(std::size_t i) const { return f[i] - y[i]; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alphas[i1], a2_old = alphas[i2];
        const int y1 = y[i1], y2 = y[i2];
        const double e1 = error(i1), e2 = error(i2);
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C, C + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C);
            hi = std::min(C, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double k11 = K[i1][i1], k12 = K[i1][i2], k22 = K[i2][i2];
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > kEps) {
            a2 = a2_old + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // flat direction: evaluate the objective change at both bounds
            const double f1 = y1 * (e1 + b) - a1_old * k11 - s * a2_old * k12;
            const double f2 = y2 * (e2 + b) - s * a1_old * k12 - a2_old * k22;
            const double l1 = a1_old + s * (a2_old - lo);
            const double h1 = a1_old + s * (a2_old - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - kEps) {
                a2 = lo;
            } else if (obj_lo > obj_hi + kEps) {
                a2 = hi;
            } else {
                return false;
            }
        }
        if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        const double da1 = a1 - a1_old, da2 = a2 - a2_old;
        const double b1 = b - e1 - y1 * da1 * k11 - y2 * da2 * k12;
        const double b2 = b - e2 - y1 * da1 * k12 - y2 * da2 * k22;
        double b_new;
        if (a1 > 0.0 && a1 < C) {
            b_new = b1;
        } else if (a2 > 0.0 && a2 < C) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }
        const double db = b_new - b;
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] += y1 * da1 * K[i1][i] + y2 * da2 * K[i2][i] + db;
        }
        alphas[i1] = a1;
        alphas[i2] = a2;
        b = b_new;
        return true;
    }

    bool violates_kkt(std::size_t i) const {
        const double r = error(i) * y[i];
        return (r < -tol && alphas[i] < C) || (r > tol && alphas[i] > 0.0);
    }

    bool examine(std::size_t i2, Rng& rng) {
        if (!violates_kkt(i2)) return false;
        const std::size_t n = alphas.size();

        // second-choice heuristic: maximize |e1 - e2| over non-bound points
        const double e2 = error(i2);
        double best_gap = -1.0;
        std::size_t best_i1 = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (alphas[i] > 0.0 && alphas[i] < C) {
                const double gap = std::abs(error(i) - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best_i1 = i;
                }
            }
        }
        if (best_i1 < n && take_step(best_i1, i2)) return true;

        const std::size_t start1 = static_cast<std::size_t>(rng.uniform_index(n));
        for (std::size_t off = 0; off < n; ++off) {
            const std::size_t i1 = (start1 + off) % n;
            if (alphas[i1] > 0.0 && alphas[i1] < C && take_step(i1, i2)) return true;
        }
        const std::size_t start2 = static_cast<std::size_t>(rng.uniform_index(n));
        for (std::size_t off = 0; off < n; ++off) {
            const std::size_t i1 = (start2 + off) % n;
            if (take_step(i1, i2)) return true;
        }
        return false;
    }
};

}  // namespace detail

/// Trains the SVM dual by sequential minimal optimization. If max_passes runs
/// out before every multiplier satisfies the KKT conditions at tolerance tol,
/// the best-so-far model is returned with converged=false.
inline SvmModel train_svm(const LabeledDataset& train, SvmParams params = {}) {
    if (!train.has_both_classes()) {
        throw validation_error("DegenerateDataset", "train_svm needs both classes");
    }
    const std::size_t n = train.size();
    const std::size_t dim = train.dim();

    SvmModel model;
    model.kernel = params.kernel;
    model.gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(dim);
    model.C = params.C;
    model.train_x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        model.train_x.emplace_back(train.point(i), train.point(i) + dim);
        model.train_y.push_back(train.label(i) == 1 ? 1 : -1);
    }
    model.alphas.assign(n, 0.0);
    model.bias = 0.0;

    std::vector<std::vector<double>> kmat(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = model.kernel_value(model.train_x[i].data(), model.train_x[j].data(), dim);
            kmat[i][j] = v;
            kmat[j][i] = v;
        }
    }

    detail::SmoState state{model.train_y, model.alphas, model.bias, kmat,
                           std::vector<double>(n, 0.0), params.C, params.tol};
    Rng rng(params.seed);

    bool examine_all = true;
    std::size_t pass = 0;
    while (pass < params.max_passes) {
        ++pass;
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (examine_all || (model.alphas[i] > 0.0 && model.alphas[i] < params.C)) {
                changed += state.examine(i, rng) ? 1 : 0;
            }
        }
        if (examine_all) {
            if (changed == 0) return model;  // full pass, nothing actionable
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
    }
    model.converged = false;
    return model;
}

}  // namespace drivestyle
