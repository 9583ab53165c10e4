// Copyright 2026 The maxgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// How many records there are: N(x), counts per interval [e^k, e^{k+1}),
// class averages, and the 2 - kappa / (log x - delta) fit.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "maxgap/evstats.hpp"
#include "maxgap/gapscan.hpp"
#include "maxgap/parallel.hpp"

namespace maxgap {

struct IntervalCounts {
    u64 q = 0;
    int k_min = 0;
    int k_max = 0;
    std::vector<double> mean_counts;     // per k, averaged over phi(q) classes
    std::vector<u64> coverage;           // classes whose scan covers all of [e^k, e^{k+1})
    std::map<u64, std::vector<u64>> per_class_counts;  // r -> counts
};

struct HyperbolaFit {
    double kappa = 0;
    double delta = 0;
    double residual = 0;  // RMS
    std::size_t points = 0;
    int iterations = 0;

    double operator()(double log_x) const { return 2.0 - kappa / (log_x - delta); }
};

class insufficient_data_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<GapRecord> records_of(std::span<const RescaledGap> rescaled) {
    std::vector<GapRecord> out;
    out.reserve(rescaled.size());
    for (const auto& r : rescaled) out.push_back(r.record);
    return out;
}

/// N(x): records with end <= x. Records must be sorted by end.
inline u64 count_records(std::span<const GapRecord> records, u64 x) {
    const auto it = std::upper_bound(records.begin(), records.end(), x,
                                     [](u64 v, const GapRecord& r) { return v < r.end; });
    return static_cast<u64>(it - records.begin());
}

/// k with e^k <= n < e^{k+1}, for n >= 1.
inline int log_bin(u64 n) {
    const long double v = static_cast<long double>(n);
    int k = static_cast<int>(std::floor(std::log(v)));
    while (k > 0 && v < std::exp(static_cast<long double>(k))) --k;
    while (v >= std::exp(static_cast<long double>(k + 1))) ++k;
    return k;
}

inline std::vector<u64> interval_counts(std::span<const GapRecord> records, int k_min, int k_max) {
    if (k_min > k_max) throw std::invalid_argument("interval_counts needs k_min <= k_max");
    std::vector<u64> counts(static_cast<std::size_t>(k_max - k_min + 1), 0);
    for (const auto& r : records) {
        const int k = log_bin(r.end);
        if (k >= k_min && k <= k_max) ++counts[static_cast<std::size_t>(k - k_min)];
    }
    return counts;
}

/// Scans every admissible class mod q to limit and averages the interval counts.
/// A bin counts as covered only when e^{k+1} <= limit.
inline IntervalCounts mean_over_classes(u64 q, u64 limit, int k_min, int k_max,
                                        const TrendParams& params = {}, unsigned threads = 1) {
    if (q < 3) throw std::invalid_argument("mean_over_classes needs q >= 3");
    if (k_min > k_max) throw std::invalid_argument("mean_over_classes needs k_min <= k_max");
    const auto classes = admissible_classes(q);
    auto counts = parallel_map(classes.size(), threads, [&](std::size_t i) {
        const auto recs = records_of(scan_records(classes[i], limit, params));
        return interval_counts(recs, k_min, k_max);
    });

    IntervalCounts out;
    out.q = q;
    out.k_min = k_min;
    out.k_max = k_max;
    const std::size_t bins = static_cast<std::size_t>(k_max - k_min + 1);
    std::vector<u64> sums(bins, 0);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t b = 0; b < bins; ++b) sums[b] += counts[i][b];
        out.per_class_counts.emplace(classes[i].r, std::move(counts[i]));
    }
    const double denom = static_cast<double>(classes.size());
    for (std::size_t b = 0; b < bins; ++b) {
        out.mean_counts.push_back(static_cast<double>(sums[b]) / denom);
        const long double upper = std::exp(static_cast<long double>(k_min + static_cast<int>(b) + 1));
        out.coverage.push_back(upper <= static_cast<long double>(limit) ? classes.size() : 0);
    }
    return out;
}

/// Least squares fit of means ~ 2 - kappa / (log_x - delta) by damped Gauss-Newton
/// (Levenberg-Marquardt), starting from delta = 0, kappa = 2 (2 - first mean).
inline HyperbolaFit fit_hyperbola(std::span<const double> log_x, std::span<const double> means) {
    if (log_x.size() != means.size()) throw std::invalid_argument("fit_hyperbola size mismatch");
    const std::size_t n = means.size();
    if (n < 3) throw insufficient_data_error("fit_hyperbola needs at least 3 points");
    const double x_floor = *std::min_element(log_x.begin(), log_x.end());

    auto sse = [&](double kappa, double delta) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = means[i] - (2.0 - kappa / (log_x[i] - delta));
            s += r * r;
        }
        return s;
    };

    double kappa = 2.0 * (2.0 - means[0]);
    double delta = 0.0;
    if (!(delta < x_floor - 1e-9)) delta = x_floor - 1.0;
    double cost = sse(kappa, delta);
    double lambda = 1e-3;
    int it = 0;
    for (; it < 1000; ++it) {
        // J^T J and J^T r for the model f = 2 - kappa / (x - delta).
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = log_x[i] - delta;
            const double jk = -1.0 / z;
            const double jd = -kappa / (z * z);
            const double r = means[i] - (2.0 - kappa / z);
            a11 += jk * jk;
            a12 += jk * jd;
            a22 += jd * jd;
            g1 += jk * r;
            g2 += jd * r;
        }
        if (cost < 1e-30 || std::hypot(g1, g2) < 1e-15) break;

        bool accepted = false;
        double step = 0;
        while (lambda < 1e20) {
            const double m11 = a11 * (1 + lambda), m22 = a22 * (1 + lambda);
            const double det = m11 * m22 - a12 * a12;
            if (det != 0 && std::isfinite(det)) {
                const double dk = (g1 * m22 - g2 * a12) / det;
                const double dd = (m11 * g2 - a12 * g1) / det;
                const double nk = kappa + dk, nd = delta + dd;
                if (nd < x_floor - 1e-6) {
                    const double nc = sse(nk, nd);
                    if (nc <= cost) {
                        step = std::hypot(dk, dd) / (1 + std::hypot(kappa, delta));
                        kappa = nk;
                        delta = nd;
                        cost = nc;
                        lambda = std::max(lambda / 10, 1e-12);
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 10;
        }
        if (!accepted || step < 1e-13) break;
    }
    if (it >= 1000) throw convergence_error("fit_hyperbola: no convergence in 1000 iterations");

    HyperbolaFit fit;
    fit.kappa = kappa;
    fit.delta = delta;
    fit.residual = std::sqrt(cost / static_cast<double>(n));
    fit.points = n;
    fit.iterations = it;
    return fit;
}

/// Fits the covered bins of a class average, using log x = k + 1/2 for bin k.
inline HyperbolaFit fit_hyperbola(const IntervalCounts& means) {
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < means.mean_counts.size(); ++b) {
        if (b < means.coverage.size() && means.coverage[b] == 0) continue;
        xs.push_back(means.k_min + static_cast<double>(b) + 0.5);
        ys.push_back(means.mean_counts[b]);
    }
    return fit_hyperbola(xs, ys);
}

/// max(0, 2 log(li x / phi(q))).
inline double guesstimate_N(u64 q, double x) {
    if (!(x > 1)) throw std::domain_error("guesstimate_N needs x > 1");
    const double v = 2.0 * std::log(li(x) / static_cast<double>(euler_phi(q)));
    return std::max(0.0, v);
}

}  // namespace maxgap
