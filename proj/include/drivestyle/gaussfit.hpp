#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "drivestyle/error.hpp"
#include "drivestyle/sensor.hpp"

namespace drivestyle {

// Sum of two Gaussians a*exp(-(x-b)^2 / 2c^2), canonically ordered b1 <= b2.
struct GaussianPair {
    double a1 = 0.0, b1 = 0.0, c1 = 1.0;
    double a2 = 0.0, b2 = 0.0, c2 = 1.0;
    double rmse = 0.0;

    GaussianPair& canonicalize() {
        if (b2 < b1) {
            std::swap(a1, a2);
            std::swap(b1, b2);
            std::swap(c1, c2);
        }
        return *this;
    }
};

inline double eval_two_gaussians(const GaussianPair& p, double x) {
    if (p.c1 <= 0.0 || p.c2 <= 0.0) {
        throw validation_error("NonPositiveWidth", "gaussian widths must be positive");
    }
    const double z1 = (x - p.b1) / p.c1;
    const double z2 = (x - p.b2) / p.c2;
    return p.a1 * std::exp(-0.5 * z1 * z1) + p.a2 * std::exp(-0.5 * z2 * z2);
}

/// Partial derivatives of eval_two_gaussians with respect to
/// (a1, b1, c1, a2, b2, c2).
inline std::array<double, 6> two_gaussian_jacobian_row(const GaussianPair& p, double x) {
    if (p.c1 <= 0.0 || p.c2 <= 0.0) {
        throw validation_error("NonPositiveWidth", "gaussian widths must be positive");
    }
    const double z1 = (x - p.b1) / p.c1;
    const double z2 = (x - p.b2) / p.c2;
    const double e1 = std::exp(-0.5 * z1 * z1);
    const double e2 = std::exp(-0.5 * z2 * z2);
    return {e1,
            p.a1 * e1 * z1 / p.c1,
            p.a1 * e1 * z1 * z1 / p.c1,
            e2,
            p.a2 * e2 * z2 / p.c2,
            p.a2 * e2 * z2 * z2 / p.c2};
}

struct TwoGaussianFit {
    GaussianPair params;
    std::vector<double> ssr_trace;  // sum of squared residuals per accepted step
    bool converged = true;
    std::size_t iterations = 0;
};

namespace detail {

// Initialization: centers at the two strongest local extrema of |y| (global
// max plus runner-up when the signal has fewer than two), amplitudes at the y
// values there, both widths at one sixth of the span.
inline GaussianPair init_two_gaussians(const std::vector<double>& ts, const std::vector<double>& ys) {
    const std::size_t n = ts.size();
    std::vector<std::size_t> extrema;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double m = std::abs(ys[i]);
        if (m > std::abs(ys[i - 1]) && m >= std::abs(ys[i + 1])) extrema.push_back(i);
    }
    std::sort(extrema.begin(), extrema.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(ys[a]) > std::abs(ys[b]); });

    std::size_t i1, i2;
    if (extrema.size() >= 2) {
        i1 = extrema[0];
        i2 = extrema[1];
    } else {
        // fall back to the largest |y| (or the lone extremum) plus the
        // largest |y| elsewhere
        i1 = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(ys[i]) > std::abs(ys[i1])) i1 = i;
        }
        if (!extrema.empty()) i1 = extrema[0];
        i2 = i1 == 0 ? 1 : 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != i1 && std::abs(ys[i]) > std::abs(ys[i2])) i2 = i;
        }
    }

    GaussianPair p;
    p.a1 = ys[i1];
    p.b1 = ts[i1];
    p.a2 = ys[i2];
    p.b2 = ts[i2];
    p.c1 = p.c2 = std::max((ts.back() - ts.front()) / 6.0, 1e-3);
    return p.canonicalize();
}

inline double sum_squared_residuals(const GaussianPair& p, const std::vector<double>& ts,
                                    const std::vector<double>& ys) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - eval_two_gaussians(p, ts[i]);
        ssr += r * r;
    }
    return ssr;
}

}  // namespace detail

/// Fits the two-Gaussian model by damped least squares: repeatedly solve
/// (J^T J + mu I) delta = J^T r with adaptive damping, widths optimized in
/// log-space so they stay positive. Stops when the relative residual change
/// drops below tol or max_iters is reached. A run whose normal equations turn
/// singular returns the best parameters so far with converged=false.
inline TwoGaussianFit fit_two_gaussians(const std::vector<double>& ts, const std::vector<double>& ys,
                                        std::size_t max_iters = 200, double tol = 1e-10) {
    if (ts.size() != ys.size() || ts.size() < 12) {
        throw validation_error("TooFewSamples",
                               "need >= 12 samples to fit 6 parameters, got " + std::to_string(ts.size()));
    }
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] <= ts[i - 1]) {
            throw validation_error("NonMonotoneTime", "sample times must strictly increase");
        }
    }

    const std::size_t n = ts.size();
    TwoGaussianFit fit;
    GaussianPair p = detail::init_two_gaussians(ts, ys);
    double ssr = detail::sum_squared_residuals(p, ts, ys);
    fit.ssr_trace.push_back(ssr);

    double mu = 1e-3;
    constexpr double kMuGrow = 10.0, kMuShrink = 0.25, kMuMax = 1e12;

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        ++fit.iterations;
        // Jacobian of residuals w.r.t. (a1, b1, log c1, a2, b2, log c2);
        // column for log c is c times the dc column (chain rule)
        Eigen::MatrixXd jac(n, 6);
        Eigen::VectorXd resid(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = two_gaussian_jacobian_row(p, ts[i]);
            jac(i, 0) = row[0];
            jac(i, 1) = row[1];
            jac(i, 2) = row[2] * p.c1;
            jac(i, 3) = row[3];
            jac(i, 4) = row[4];
            jac(i, 5) = row[5] * p.c2;
            resid(i) = ys[i] - eval_two_gaussians(p, ts[i]);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;

        bool stepped = false;
        while (mu < kMuMax) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += mu;
            const Eigen::LDLT<Eigen::MatrixXd> solver(damped);
            if (solver.info() != Eigen::Success) {
                mu *= kMuGrow;
                continue;
            }
            const Eigen::VectorXd delta = solver.solve(jtr);
            if (!delta.allFinite()) {
                mu *= kMuGrow;
                continue;
            }
            GaussianPair trial = p;
            trial.a1 += delta(0);
            trial.b1 += delta(1);
            trial.c1 = p.c1 * std::exp(std::clamp(delta(2), -4.0, 4.0));
            trial.a2 += delta(3);
            trial.b2 += delta(4);
            trial.c2 = p.c2 * std::exp(std::clamp(delta(5), -4.0, 4.0));
            const double trial_ssr = detail::sum_squared_residuals(trial, ts, ys);
            if (trial_ssr <= ssr) {
                const double gain = ssr - trial_ssr;
                p = trial;
                ssr = trial_ssr;
                fit.ssr_trace.push_back(ssr);
                mu = std::max(mu * kMuShrink, 1e-12);
                stepped = true;
                if (gain <= tol * std::max(ssr, 1e-30)) {
                    iter = max_iters;  // relative improvement exhausted
                }
                break;
            }
            mu *= kMuGrow;
        }
        if (!stepped) {
            fit.converged = mu < kMuMax;
            break;
        }
    }

    p.canonicalize();
    p.rmse = std::sqrt(ssr / static_cast<double>(n));
    fit.params = p;
    return fit;
}

/// Six-component alternative feature vector (a1, b1-t0, c1, a2, b2-t0, c2)
/// from fitting the steering-wheel speed channel; centers are reported
/// relative to the segment start so the features are shift-invariant.
inline std::array<double, 6> gauss_features(const SensorSegment& segment, std::size_t max_iters = 200,
                                            double tol = 1e-10) {
    const std::vector<double> ts = [&] {
        std::vector<double> out(segment.samples.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = segment.samples[i].t;
        return out;
    }();
    const TwoGaussianFit fit = fit_two_gaussians(ts, channel_gz(segment), max_iters, tol);
    const double t0 = ts.front();
    const GaussianPair& p = fit.params;
    return {p.a1, p.b1 - t0, p.c1, p.a2, p.b2 - t0, p.c2};
}

}  // namespace drivestyle
