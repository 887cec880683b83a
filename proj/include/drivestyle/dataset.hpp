#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/features.hpp"

namespace drivestyle {

// A standardized binary-labeled design matrix. x holds the standardized
// copies (row-major, n x dim); the per-feature mean/stddev of the raw inputs
// are kept so raw values can be mapped in or out later. Dangerous is the
// positive class throughout.
class LabeledDataset {
public:
    LabeledDataset(const std::vector<std::vector<double>>& raw, std::vector<int> labels)
        : y_(std::move(labels)) {
        if (raw.size() < 2) {
            throw validation_error("DegenerateDataset", "need at least 2 points");
        }
        if (raw.size() != y_.size()) {
            throw validation_error("DegenerateDataset", "row/label count mismatch");
        }
        n_ = raw.size();
        dim_ = raw.front().size();
        for (const auto& row : raw) {
            if (row.size() != dim_) {
                throw validation_error("DegenerateDataset", "ragged feature matrix");
            }
        }
        bool has_pos = false, has_neg = false;
        for (int label : y_) {
            if (label != 0 && label != 1) {
                throw validation_error("DegenerateDataset", "labels must be 0 (safe) or 1 (dangerous)");
            }
            (label == 1 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
            throw validation_error("DegenerateDataset", "both classes must be present");
        }

        mean_.assign(dim_, 0.0);
        stddev_.assign(dim_, 0.0);
        for (std::size_t r = 0; r < dim_; ++r) {
            double m = 0.0;
            for (std::size_t i = 0; i < n_; ++i) m += raw[i][r];
            m /= static_cast<double>(n_);
            double ss = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double d = raw[i][r] - m;
                ss += d * d;
            }
            // sample stddev, floored so constant columns standardize to 0
            double sd = std::sqrt(ss / static_cast<double>(n_ - 1));
            mean_[r] = m;
            stddev_[r] = std::max(sd, 1e-12);
        }
        x_.assign(n_ * dim_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t r = 0; r < dim_; ++r) {
                x_[i * dim_ + r] = (raw[i][r] - mean_[r]) / stddev_[r];
            }
        }
    }

    static LabeledDataset from_feature_rows(const std::vector<FeatureRow>& rows) {
        std::vector<std::vector<double>> raw;
        std::vector<int> labels;
        raw.reserve(rows.size());
        for (const auto& row : rows) {
            if (row.label == Label::Unlabeled) {
                throw validation_error("DegenerateDataset",
                                       "segment '" + row.segment_id + "' is unlabeled");
            }
            raw.emplace_back(row.features.v.begin(), row.features.v.end());
            labels.push_back(row.label == Label::Dangerous ? 1 : 0);
        }
        return LabeledDataset(raw, std::move(labels));
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    int label(std::size_t i) const { return y_[i]; }
    const std::vector<int>& labels() const { return y_; }
    const double* point(std::size_t i) const { return x_.data() + i * dim_; }
    double at(std::size_t i, std::size_t r) const { return x_[i * dim_ + r]; }
    const std::vector<double>& feature_mean() const { return mean_; }
    const std::vector<double>& feature_stddev() const { return stddev_; }

    /// Dataset restricted to the given feature columns (1-based indices).
    LabeledDataset restrict_columns(const std::vector<std::size_t>& indices1) const {
        LabeledDataset out = *this;
        out.dim_ = indices1.size();
        out.mean_.clear();
        out.stddev_.clear();
        out.x_.assign(n_ * out.dim_, 0.0);
        for (std::size_t c = 0; c < indices1.size(); ++c) {
            const std::size_t r = indices1[c];
            if (r < 1 || r > dim_) {
                throw validation_error("BadFeatureIndex", "index " + std::to_string(r) + " out of range");
            }
            out.mean_.push_back(mean_[r - 1]);
            out.stddev_.push_back(stddev_[r - 1]);
            for (std::size_t i = 0; i < n_; ++i) {
                out.x_[i * out.dim_ + c] = at(i, r - 1);
            }
        }
        return out;
    }

    /// Dataset with only the given row indices (keeps standardization).
    LabeledDataset subset_rows(const std::vector<std::size_t>& rows) const {
        LabeledDataset out = *this;
        out.n_ = rows.size();
        out.x_.assign(rows.size() * dim_, 0.0);
        out.y_.clear();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            for (std::size_t r = 0; r < dim_; ++r) {
                out.x_[k * dim_ + r] = at(rows[k], r);
            }
            out.y_.push_back(y_[rows[k]]);
        }
        return out;
    }

    bool has_both_classes() const {
        bool pos = false, neg = false;
        for (int label : y_) (label == 1 ? pos : neg) = true;
        return pos && neg;
    }

    std::size_t count_class(int cls) const {
        std::size_t c = 0;
        for (int label : y_) c += (label == cls);
        return c;
    }

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> x_;  // standardized, row-major
    std::vector<int> y_;
    std::vector<double> mean_;
    std::vector<double> stddev_;
};

}  // namespace drivestyle
