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

// Record (maximal) gaps between primes of one residue class, the Wolf-type
// trend curve they follow, and the three rescalings w, u and h.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "maxgap/numth.hpp"

namespace maxgap {

/// Empirical correction b(q,x) = (b0 + b1 / max(2, log log x)^d) * log phi(q).
struct TrendParams {
    double b0 = 1.0;
    double b1 = 4.0;
    double d = 2.7;

    void validate() const {
        if (!(d > 0) || !std::isfinite(b0) || !std::isfinite(b1) || !std::isfinite(d)) {
            throw std::invalid_argument("trend parameters need finite b0, b1 and d > 0");
        }
    }
};

struct GapRecord {
    u64 start = 0;
    u64 end = 0;
    u64 gap = 0;
    ResidueClass cls;

    friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

struct RescaledGap {
    GapRecord record;
    double w = 0;  // (gap - T) / a
    double u = 0;  // same, without the correction term b
    double h = 0;  // gap / a - log(li x / phi(q))
};

enum class RescaleMode { W, U, H };

/// The x-dependent pieces shared by the trend, the rescalings and the control trend.
struct TrendTerms {
    double phi;
    double li_x;
    double log_x;
    double a;       // phi * x / li x
    double log_n;   // log(li x / phi): log of the expected number of class primes below x

    TrendTerms(double phi_q, double x)
        : phi(phi_q), li_x(li(x)), log_x(std::log(x)), a(phi_q * x / li_x),
          log_n(std::log(li_x / phi_q)) {}
};

inline TrendTerms trend_terms(u64 q, double x) {
    return TrendTerms(static_cast<double>(euler_phi(q)), x);
}

inline double avg_gap(u64 q, double x) { return trend_terms(q, x).a; }

namespace detail {

inline double correction_b(double phi, double log_x, const TrendParams& params) {
    const double loglog = std::log(log_x);
    return (params.b0 + params.b1 / std::pow(std::max(2.0, loglog), params.d)) * std::log(phi);
}

}  // namespace detail

inline double correction_b(u64 q, double x, const TrendParams& params = {}) {
    if (!(x > std::exp(1.0))) throw std::domain_error("correction_b needs x > e");
    params.validate();
    return detail::correction_b(static_cast<double>(euler_phi(q)), std::log(x), params);
}

/// Trend curve T(q,x) = a * (2 log(li x / phi) - log x + b).
inline double trend_T(u64 q, double x, const TrendParams& params = {}) {
    if (!(x > std::exp(1.0))) throw std::domain_error("trend_T needs x > e");
    params.validate();
    const TrendTerms t = trend_terms(q, x);
    return t.a * (2 * t.log_n - t.log_x + detail::correction_b(t.phi, t.log_x, params));
}

/// All three rescaled values of a record, with every term evaluated at x = end.
inline RescaledGap rescale_all(const GapRecord& rec, const TrendParams& params = {}) {
    const TrendTerms t = trend_terms(rec.cls.q, static_cast<double>(rec.end));
    const double g_over_a = static_cast<double>(rec.gap) / t.a;
    RescaledGap out{rec, 0, 0, 0};
    out.h = g_over_a - t.log_n;
    out.u = g_over_a - 2 * t.log_n + t.log_x;
    out.w = out.u - detail::correction_b(t.phi, t.log_x, params);
    return out;
}

inline double rescale(const GapRecord& rec, RescaleMode mode, const TrendParams& params = {}) {
    const RescaledGap all = rescale_all(rec, params);
    switch (mode) {
        case RescaleMode::W: return all.w;
        case RescaleMode::U: return all.u;
        case RescaleMode::H: return all.h;
    }
    return all.w;
}

/// gap / (phi(q) log^2 end); above 1 means the record breaks the naive Cramer-type bound.
inline double cramer_ratio(const GapRecord& rec) {
    const double log_end = std::log(static_cast<double>(rec.end));
    return static_cast<double>(rec.gap) /
           (static_cast<double>(euler_phi(rec.cls.q)) * log_end * log_end);
}

inline bool is_exceptional(const GapRecord& rec) { return cramer_ratio(rec) > 1.0; }

/// Streams the record gaps of one class whose end prime is <= limit.
///
/// From the current prime p with current record g, any gap longer than g must
/// straddle m = p + g, so only the primes around m are examined; everything in
/// [p, m] is skipped.
class GapScanner {
  public:
    /// Resume point: the last record's end prime and size (prime = pmin, record = 0 at start).
    struct State {
        u64 prime = 0;
        u64 record = 0;
        u64 emitted = 0;
        bool finished = false;

        friend bool operator==(const State&, const State&) = default;
    };

    GapScanner(ResidueClass cls, u64 limit, TrendParams params = {})
        : cls_(cls), limit_(limit), params_(params) {
        check_limit();
        params_.validate();
        state_.prime = pmin(cls_);
    }

    GapScanner(ResidueClass cls, u64 limit, TrendParams params, State resume)
        : cls_(cls), limit_(limit), params_(params), state_(resume) {
        check_limit();
        params_.validate();
        if (state_.record % cls_.q != 0 || !is_prime(state_.prime) ||
            state_.prime % cls_.q != cls_.r % cls_.q) {
            throw std::invalid_argument("resume state is not consistent with the residue class");
        }
    }

    std::optional<RescaledGap> next() {
        while (!state_.finished) {
            const u64 p = state_.prime;
            const u64 re = state_.record;
            const u64 m = detail::checked_add(p, re);
            if (m >= limit_ || limit_ - m < cls_.q) {
                state_.finished = true;
                break;
            }
            u64 end = m + cls_.q;
            while (!is_prime(end)) {
                if (limit_ - end < cls_.q) {
                    state_.finished = true;
                    return std::nullopt;
                }
                end += cls_.q;
            }
            const u64 start = detail::step_down_to_prime(m, cls_.q);
            const u64 g = end - start;
            state_.prime = end;
            if (g > re) {
                state_.record = g;
                ++state_.emitted;
                return rescale_all(GapRecord{start, end, g, cls_}, params_);
            }
        }
        return std::nullopt;
    }

    const State& state() const { return state_; }
    const ResidueClass& residue_class() const { return cls_; }
    u64 limit() const { return limit_; }

  private:
    void check_limit() const {
        if (limit_ < 2) throw std::invalid_argument("scan limit must be >= 2");
    }

    ResidueClass cls_;
    u64 limit_;
    TrendParams params_;
    State state_;
};

inline std::vector<RescaledGap> scan_records(const ResidueClass& cls, u64 limit,
                                             const TrendParams& params = {}) {
    GapScanner scanner(cls, limit, params);
    std::vector<RescaledGap> out;
    while (auto rec = scanner.next()) out.push_back(*rec);
    return out;
}

}  // namespace maxgap
