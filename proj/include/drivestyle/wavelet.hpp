#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "drivestyle/error.hpp"

namespace drivestyle {

// Analysis filter pair. Both filters must be orthonormal (unit energy,
// mutually orthogonal); haar() is the only pair shipped.
struct FilterPair {
    std::vector<double> low;
    std::vector<double> high;

    static FilterPair haar() {
        const double s = 1.0 / std::sqrt(2.0);
        return FilterPair{{s, s}, {s, -s}};
    }
};

// 4-level decomposition. d1 is the finest detail band. level_len[l] records
// the (pre-padding) input length of analysis level l, which the inverse
// transform needs to undo the odd-length padding.
struct DwtDecomposition {
    std::vector<double> a4;
    std::vector<double> d4;
    std::vector<double> d3;
    std::vector<double> d2;
    std::vector<double> d1;
    std::vector<std::size_t> level_len;  // input length of levels 1..4
};

/// One analysis step: periodic correlation with each filter, downsampled by 2.
/// Odd-length input is first padded by repeating the last sample, so the
/// output length is ceil(len/2).
///
///   approx[n] = sum_j low[j]  * x[(2n + j) mod m]
///   detail[n] = sum_j high[j] * x[(2n + j) mod m]
///
/// With the fixed high-pass orientation [1/sqrt2, -1/sqrt2] a rising pair
/// (x[2n] < x[2n+1]) yields a negative detail coefficient.
inline std::pair<std::vector<double>, std::vector<double>> dwt_step(const std::vector<double>& signal,
                                                                    const FilterPair& filters) {
    if (signal.empty()) {
        throw validation_error("EmptySignal", "dwt_step needs at least one sample");
    }
    std::vector<double> x = signal;
    if (x.size() % 2 != 0) {
        x.push_back(x.back());
    }
    const std::size_t m = x.size();
    const std::size_t half = m / 2;
    std::vector<double> approx(half, 0.0);
    std::vector<double> detail(half, 0.0);
    for (std::size_t n = 0; n < half; ++n) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t j = 0; j < filters.low.size(); ++j) {
            lo += filters.low[j] * x[(2 * n + j) % m];
        }
        for (std::size_t j = 0; j < filters.high.size(); ++j) {
            hi += filters.high[j] * x[(2 * n + j) % m];
        }
        approx[n] = lo;
        detail[n] = hi;
    }
    return {std::move(approx), std::move(detail)};
}

/// Recursive 4-level Haar decomposition of the signal.
inline DwtDecomposition decompose4(const std::vector<double>& signal) {
    if (signal.size() < 16) {
        throw validation_error("TooShort",
                               "decompose4 needs >= 16 samples, got " + std::to_string(signal.size()));
    }
    const FilterPair haar = FilterPair::haar();
    DwtDecomposition dec;
    std::vector<double> current = signal;
    std::vector<std::vector<double>> details;
    for (int level = 0; level < 4; ++level) {
        dec.level_len.push_back(current.size());
        auto [approx, detail] = dwt_step(current, haar);
        details.push_back(std::move(detail));
        current = std::move(approx);
    }
    dec.a4 = std::move(current);
    dec.d1 = std::move(details[0]);
    dec.d2 = std::move(details[1]);
    dec.d3 = std::move(details[2]);
    dec.d4 = std::move(details[3]);
    return dec;
}

namespace detail {

// Inverse of one Haar analysis step; `target_len` undoes the padding.
inline std::vector<double> idwt_step_haar(const std::vector<double>& approx,
                                          const std::vector<double>& detail, std::size_t target_len) {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<double> x(2 * approx.size(), 0.0);
    for (std::size_t n = 0; n < approx.size(); ++n) {
        x[2 * n] = s * (approx[n] + detail[n]);
        x[2 * n + 1] = s * (approx[n] - detail[n]);
    }
    x.resize(target_len);
    return x;
}

}  // namespace detail

/// Inverse 4-level transform. Exact (to rounding) whenever every level input
/// length was even; odd levels were padded lossily and only approximate.
inline std::vector<double> reconstruct(const DwtDecomposition& dec, std::size_t original_len) {
    if (dec.level_len.size() != 4 || dec.level_len[0] != original_len) {
        throw validation_error("ShapeMismatch", "decomposition does not describe a 4-level transform of the given length");
    }
    auto expect = [](std::size_t n) { return n / 2 + n % 2; };
    if (dec.d1.size() != expect(dec.level_len[0]) || dec.d2.size() != expect(dec.level_len[1]) ||
        dec.d3.size() != expect(dec.level_len[2]) || dec.d4.size() != expect(dec.level_len[3]) ||
        dec.a4.size() != dec.d4.size()) {
        throw validation_error("ShapeMismatch", "coefficient band lengths are inconsistent");
    }
    std::vector<double> x = detail::idwt_step_haar(dec.a4, dec.d4, dec.level_len[3]);
    x = detail::idwt_step_haar(x, dec.d3, dec.level_len[2]);
    x = detail::idwt_step_haar(x, dec.d2, dec.level_len[1]);
    x = detail::idwt_step_haar(x, dec.d1, dec.level_len[0]);
    return x;
}

/// Population variance, sum((x - mean)^2) / n.
inline double variance(const std::vector<double>& xs) {
    if (xs.empty()) {
        throw validation_error("EmptyInput", "variance of an empty sequence");
    }
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double v : xs) {
        const double d = v - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(xs.size());
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) {
        throw validation_error("EmptyInput", "mean of an empty sequence");
    }
    double m = 0.0;
    for (double v : xs) m += v;
    return m / static_cast<double>(xs.size());
}

}  // namespace drivestyle
