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

// Finite-range evidence for the Cramer, Shanks and Firoozbakht type
// statements about record gaps in residue classes. Nothing here asserts a
// conjecture; every function reports what the scanned range shows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "maxgap/gapscan.hpp"
#include "maxgap/numth.hpp"

namespace maxgap {

/// Trend G ~ a (log(li x / phi) - c1 log log x + c0). An unset c0 is chosen so
/// that the median rescaled residual over the report's records is zero.
struct TrendConjectureParams {
    std::optional<double> c0;
    double c1 = 1.0;
};

struct ConjectureReport {
    ResidueClass cls;
    u64 limit = 0;
    std::vector<std::pair<u64, double>> per_record_ratios;  // (end, gap / (phi log^2 end))
    std::vector<GapRecord> exceptional;                     // ratio > 1
    std::optional<double> max_ratio;
    double fraction_below_one = 0;
    std::vector<GapRecord> firoozbakht_violations;
    u64 sign_changes = 0;
    double c0 = 0;
};

struct SunViolation {
    u64 n = 0;
    u64 p_n = 0;
    u64 p_next = 0;
    long double margin = 0;  // n log p_{n+1} - (n+1) log p_n, >= 0 for a violation
};

struct SeriesResult {
    double partial_sum = 0;
    double tail_bound = 0;  // +inf when the series diverges

    double estimate() const { return partial_sum + tail_bound; }
};

enum class C1Regime {
    ALMOST_NEVER_BELOW,
    POSITIVE_PROPORTION,
    INFINITELY_OFTEN_ABOVE,
    FINITELY_OFTEN_ABOVE,
};

inline std::string_view to_string(C1Regime c) {
    switch (c) {
        case C1Regime::ALMOST_NEVER_BELOW: return "ALMOST_NEVER_BELOW";
        case C1Regime::POSITIVE_PROPORTION: return "POSITIVE_PROPORTION";
        case C1Regime::INFINITELY_OFTEN_ABOVE: return "INFINITELY_OFTEN_ABOVE";
        case C1Regime::FINITELY_OFTEN_ABOVE: return "FINITELY_OFTEN_ABOVE";
    }
    return "?";
}

inline double shanks_ratio(const GapRecord& rec) { return cramer_ratio(rec); }

/// gap / phi(q) < log^2 start - log start - 1.
inline bool firoozbakht_check(const GapRecord& rec) {
    const double ls = std::log(static_cast<double>(rec.start));
    return static_cast<double>(rec.gap) / static_cast<double>(euler_phi(rec.cls.q)) <
           ls * ls - ls - 1.0;
}

/// Residual (G - T_c) / a with c0 left out.
inline double trend_conjecture_offset(const GapRecord& rec, double c1) {
    const TrendTerms t = trend_terms(rec.cls.q, static_cast<double>(rec.end));
    return static_cast<double>(rec.gap) / t.a - t.log_n + c1 * std::log(t.log_x);
}

inline ConjectureReport cramer_report(const ResidueClass& cls, std::span<const GapRecord> records,
                                      u64 limit, const TrendConjectureParams& params = {}) {
    ConjectureReport rep;
    rep.cls = cls;
    rep.limit = limit;
    if (records.empty()) {
        rep.c0 = params.c0.value_or(0.0);
        return rep;
    }

    std::size_t below = 0;
    std::vector<double> offsets;
    offsets.reserve(records.size());
    for (const auto& r : records) {
        const double ratio = shanks_ratio(r);
        rep.per_record_ratios.emplace_back(r.end, ratio);
        if (ratio > 1.0) rep.exceptional.push_back(r);
        if (ratio < 1.0) ++below;
        rep.max_ratio = std::max(rep.max_ratio.value_or(ratio), ratio);
        if (!firoozbakht_check(r)) rep.firoozbakht_violations.push_back(r);
        offsets.push_back(trend_conjecture_offset(r, params.c1));
    }
    rep.fraction_below_one = static_cast<double>(below) / static_cast<double>(records.size());

    if (params.c0) {
        rep.c0 = *params.c0;
    } else {
        std::vector<double> sorted = offsets;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        rep.c0 = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }

    int last_sign = 0;
    for (double off : offsets) {
        const double resid = off - rep.c0;
        const int sign = resid > 0 ? 1 : (resid < 0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++rep.sign_changes;
        last_sign = sign;
    }
    return rep;
}

/// Indices n < n_max where p_{n+1}^{1/(n+1)} >= p_n^{1/n} in the class,
/// compared as n log p_{n+1} >= (n+1) log p_n in extended precision.
inline std::vector<SunViolation> sun_firoozbakht_scan(const ResidueClass& cls, u64 n_max) {
    if (n_max < 2) throw std::invalid_argument("sun_firoozbakht_scan needs n_max >= 2");
    std::vector<SunViolation> out;
    ClassPrimeWalker walk(cls);
    u64 prev = walk.next().value;
    long double log_prev = std::log(static_cast<long double>(prev));
    for (u64 n = 1; n < n_max; ++n) {
        const u64 cur = walk.next().value;
        const long double log_cur = std::log(static_cast<long double>(cur));
        const long double margin = static_cast<long double>(n) * log_cur -
                                   static_cast<long double>(n + 1) * log_prev;
        if (margin >= 0) out.push_back({n, prev, cur, margin});
        prev = cur;
        log_prev = log_cur;
    }
    return out;
}

/// sum_{k=1..K} log^lambda(k) / k^{1+c1}, plus an upper bound on the remaining
/// tail from the integral of the same function. The bound is infinite for c1 <= 0.
inline SeriesResult series_partial(double c1, double lambda, u64 K) {
    if (K < 1) throw std::invalid_argument("series_partial needs K >= 1");
    if (!(lambda >= 0)) throw std::invalid_argument("series_partial needs lambda >= 0");
    const double s = 1.0 + c1;
    double sum = 0, comp = 0;  // Kahan
    for (u64 k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        const double term = std::pow(std::log(kd), lambda) * std::pow(kd, -s);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    SeriesResult res;
    res.partial_sum = sum;
    if (!(c1 > 0)) {
        res.tail_bound = std::numeric_limits<double>::infinity();
        return res;
    }
    // Integral of log^lambda t / t^{1+c1} over [K, inf) is Gamma(lambda+1, c1 log K) / c1^{lambda+1}.
    const double log_k = std::log(static_cast<double>(K));
    double tail = boost::math::tgamma(lambda + 1.0, c1 * log_k) / std::pow(c1, lambda + 1.0);
    // The summand rises until log t = lambda / (1 + c1); add its peak if K is before it.
    const double peak_log = lambda / s;
    if (log_k < peak_log) tail += std::pow(peak_log, lambda) * std::exp(-s * peak_log);
    res.tail_bound = tail;
    return res;
}

inline C1Regime classify_c1(double c1) {
    if (c1 < -1) return C1Regime::ALMOST_NEVER_BELOW;
    if (c1 == -1) return C1Regime::POSITIVE_PROPORTION;
    if (c1 <= 0) return C1Regime::INFINITELY_OFTEN_ABOVE;
    return C1Regime::FINITELY_OFTEN_ABOVE;
}

}  // namespace maxgap
