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

// Gumbel (type I extreme value) distribution: cdf, quantile, maximum
// likelihood fit, the one-sample Kolmogorov-Smirnov statistic, and
// fixed-width histograms for plotting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "maxgap/numth.hpp"

namespace maxgap {

struct GumbelParams {
    double alpha = 1.0;  // scale
    double mu = 0.0;     // mode

    void validate() const {
        if (!(alpha > 0) || !std::isfinite(alpha) || !std::isfinite(mu)) {
            throw std::invalid_argument("Gumbel parameters need finite mu and alpha > 0");
        }
    }
};

struct GumbelFit {
    GumbelParams params;
    std::size_t n = 0;
    double ks = 0;
    double loglik = 0;
    int iterations = 0;
};

struct Histogram {
    double bin_start = 0;
    double bin_width = 1;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
};

class degenerate_sample_error : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class convergence_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double gumbel_cdf(double x, const GumbelParams& p) {
    return std::exp(-std::exp(-(x - p.mu) / p.alpha));
}

inline double gumbel_pdf(double x, const GumbelParams& p) {
    const double z = (x - p.mu) / p.alpha;
    return std::exp(-z - std::exp(-z)) / p.alpha;
}

inline double gumbel_mean(const GumbelParams& p) { return p.mu + kEulerGamma * p.alpha; }

inline double gumbel_quantile(double prob, const GumbelParams& p) {
    if (!(prob > 0 && prob < 1)) throw std::domain_error("gumbel_quantile needs 0 < p < 1");
    return p.mu - p.alpha * std::log(-std::log(prob));
}

/// sup |F_n - F| over the right-continuous empirical cdf.
inline double ks_stat(std::span<const double> samples, const GumbelParams& p) {
    if (samples.empty()) throw std::invalid_argument("ks_stat needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = gumbel_cdf(sorted[i], p);
        const double di = static_cast<double>(i);
        d = std::max({d, (di + 1) / n - f, f - di / n});
    }
    return d;
}

inline double gumbel_loglik(std::span<const double> samples, const GumbelParams& p) {
    double ll = 0;
    for (double x : samples) {
        const double z = (x - p.mu) / p.alpha;
        ll += -std::log(p.alpha) - z - std::exp(-z);
    }
    return ll;
}

namespace detail {

// Weighted moments under w_i = exp(-(x_i - xmin) / alpha).
struct GumbelWeights {
    double sum_w = 0;
    double mean_x = 0;  // sum x w / sum w
    double var_x = 0;   // weighted variance
};

inline GumbelWeights gumbel_weights(std::span<const double> xs, double xmin, double alpha) {
    GumbelWeights g;
    double sx = 0, sxx = 0;
    for (double x : xs) {
        const double dx = x - xmin;
        const double w = std::exp(-dx / alpha);
        g.sum_w += w;
        sx += w * dx;
        sxx += w * dx * dx;
    }
    const double m = sx / g.sum_w;
    g.mean_x = xmin + m;
    g.var_x = std::max(0.0, sxx / g.sum_w - m * m);
    return g;
}

}  // namespace detail

/// Maximum likelihood fit. The scale solves
///   alpha = mean(x) - sum x e^{-x/alpha} / sum e^{-x/alpha},
/// whose residual has derivative 1 + Var_w / alpha^2 > 0, so the root is unique
/// and a safeguarded Newton iteration inside a sign bracket always converges.
inline GumbelFit fit_gumbel(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw degenerate_sample_error("fit_gumbel needs at least two samples");
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("fit_gumbel samples must be finite");
    }
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double xmin = *lo_it;
    if (!(*hi_it > xmin)) throw degenerate_sample_error("fit_gumbel needs two distinct values");

    double mean = 0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    auto residual = [&](double alpha, double* slope) {
        const auto g = detail::gumbel_weights(samples, xmin, alpha);
        if (slope) *slope = 1 + g.var_x / (alpha * alpha);
        return alpha - mean + g.mean_x;
    };

    // Method-of-moments start, then grow a sign bracket around it.
    const double alpha0 = sd * std::sqrt(6.0) / std::numbers::pi;
    double lo = alpha0, hi = alpha0;
    for (int i = 0; residual(lo, nullptr) >= 0; ++i) {
        if (i > 200) throw convergence_error("fit_gumbel: cannot bracket the scale from below");
        lo /= 2;
    }
    for (int i = 0; residual(hi, nullptr) <= 0; ++i) {
        if (i > 200) throw convergence_error("fit_gumbel: cannot bracket the scale from above");
        hi *= 2;
    }

    double alpha = alpha0;
    int it = 0;
    for (;; ++it) {
        if (it >= 200) throw convergence_error("fit_gumbel: no convergence in 200 iterations");
        double slope = 1;
        const double f = residual(alpha, &slope);
        if (f < 0) lo = alpha; else hi = alpha;
        double next = alpha - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - alpha);
        alpha = next;
        if (step <= 1e-10 * std::max(1.0, alpha)) break;
    }

    const auto g = detail::gumbel_weights(samples, xmin, alpha);
    GumbelFit fit;
    fit.params = {alpha, xmin - alpha * std::log(g.sum_w / static_cast<double>(n))};
    fit.n = n;
    fit.ks = ks_stat(samples, fit.params);
    fit.loglik = gumbel_loglik(samples, fit.params);
    fit.iterations = it + 1;
    return fit;
}

/// Counts per half-open bin [origin + k w, origin + (k+1) w), covering the
/// occupied bins only. bin_start is the left edge of the first counted bin.
inline Histogram make_histogram(std::span<const double> samples, double bin_width,
                                double origin = 0.0) {
    if (!(bin_width > 0)) throw std::invalid_argument("bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    h.bin_start = origin;
    if (samples.empty()) return h;

    std::vector<long long> idx;
    idx.reserve(samples.size());
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("histogram samples must be finite");
        idx.push_back(static_cast<long long>(std::floor((x - origin) / bin_width)));
    }
    const auto [kmin, kmax] = std::minmax_element(idx.begin(), idx.end());
    h.bin_start = origin + static_cast<double>(*kmin) * bin_width;
    h.counts.assign(static_cast<std::size_t>(*kmax - *kmin + 1), 0);
    for (long long k : idx) ++h.counts[static_cast<std::size_t>(k - *kmin)];
    return h;
}

}  // namespace maxgap
