#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "drivestyle/error.hpp"

namespace drivestyle {

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    double tpr() const { return static_cast<double>(tp) / static_cast<double>(tp + fn); }
    // no predicted positives yields 0 by convention
    double precision() const {
        return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
};

/// Confusion counts at the 0.5 score threshold (dangerous iff score > 0.5).
inline Confusion confusion_at_half(const std::vector<double>& scores, const std::vector<int>& labels) {
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] > 0.5;
        if (labels[i] == 1) {
            (predicted ? c.tp : c.fn) += 1;
        } else {
            (predicted ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

/// Area under the ROC curve by the Mann-Whitney rank statistic with tie
/// correction. Rank sums are accumulated in integers (average tie ranks are
/// multiples of 1/2, so doubled ranks stay integral); the one floating-point
/// division at the end makes the result exactly equal to
/// (concordant + ties/2) / (n_pos * n_neg).
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    std::uint64_t n_pos = 0;
    for (int y : labels) n_pos += (y == 1);
    const std::uint64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw validation_error("DegenerateDataset", "AUC needs both classes");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // 2 * (rank sum of positives), walking tie groups; ranks are 1-based
    std::uint64_t doubled_rank_sum = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::uint64_t pos_in_group = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            pos_in_group += (labels[order[j]] == 1);
            ++j;
        }
        // average rank of the group is (first + last)/2; doubled: first + last
        doubled_rank_sum += pos_in_group * (static_cast<std::uint64_t>(i + 1) + static_cast<std::uint64_t>(j));
        i = j;
    }
    const std::uint64_t doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
    return static_cast<double>(doubled_u) / static_cast<double>(2 * n_pos * n_neg);
}

struct RepeatMetrics {
    double tpr = 0.0;
    double precision = 0.0;
    double auc = 0.0;
};

// Aggregated TPR/precision/AUC over the repeated random splits.
struct MetricsReport {
    double tpr = 0.0;
    double precision = 0.0;
    double auc = 0.0;
    std::vector<RepeatMetrics> per_repeat;
    std::size_t redrawn_splits = 0;          // repeats whose split had to be redrawn
    std::size_t non_converged_trainings = 0; // repeats whose model hit its iteration cap

    void finalize() {
        tpr = precision = auc = 0.0;
        for (const auto& m : per_repeat) {
            tpr += m.tpr;
            precision += m.precision;
            auc += m.auc;
        }
        const double n = static_cast<double>(per_repeat.size());
        if (!per_repeat.empty()) {
            tpr /= n;
            precision /= n;
            auc /= n;
        }
    }
};

}  // namespace drivestyle
