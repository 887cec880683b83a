#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

namespace detail {

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        const double d = a[r] - b[r];
        acc += d * d;
    }
    return acc;
}

}  // namespace detail

/// Lloyd's algorithm. Centers start at k distinct random points; iteration
/// stops at an assignment fixpoint or after max_iters. A cluster that empties
/// is re-seeded from the point farthest from its assigned center.
inline std::vector<std::vector<double>> kmeans(const std::vector<std::vector<double>>& points,
                                               std::size_t k, std::uint64_t seed,
                                               std::size_t max_iters = 100) {
    const std::size_t n = points.size();
    if (k == 0 || n < k) {
        throw validation_error("TooFewPoints",
                               "kmeans with k=" + std::to_string(k) + " on " + std::to_string(n) + " points");
    }
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    for (std::size_t c = 0; c < k; ++c) centers.push_back(points[order[c]]);

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> prev_assign(n, n);  // sentinel so the first pass never matches
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = detail::squared_distance(points[i], centers[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
        }
        if (assign == prev_assign) break;
        prev_assign = assign;

        const std::size_t dim = points.front().size();
        std::vector<std::size_t> count(k, 0);
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            ++count[assign[i]];
            for (std::size_t r = 0; r < dim; ++r) sums[assign[i]][r] += points[i][r];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] == 0) {
                // re-seed from the point farthest from its own center
                double far = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = detail::squared_distance(points[i], centers[assign[i]]);
                    if (d > far) {
                        far = d;
                        far_i = i;
                    }
                }
                centers[c] = points[far_i];
            } else {
                for (std::size_t r = 0; r < dim; ++r) {
                    centers[c][r] = sums[c][r] / static_cast<double>(count[c]);
                }
            }
        }
    }
    return centers;
}

}  // namespace drivestyle
