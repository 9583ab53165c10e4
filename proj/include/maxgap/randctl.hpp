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

// Control experiment: records among integers separated by random gaps
// ceil(Exp(phi(q) log p)), the counterpart of the prime record scan.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "maxgap/gapscan.hpp"
#include "maxgap/numth.hpp"

namespace maxgap {

struct SimRecord {
    u64 gap = 0;
    u64 start = 0;
    u64 end = 0;
    double h = 0;
    ResidueClass cls;

    friend bool operator==(const SimRecord&, const SimRecord&) = default;
};

struct SimConfig {
    ResidueClass cls;
    u64 limit = 2;
    u64 seed = 0;
};

inline double exp_sample(double u, double mean) {
    if (!(u > 0 && u < 1) || !(mean > 0)) {
        throw std::domain_error("exp_sample needs 0 < u < 1 and mean > 0");
    }
    return -mean * std::log(u);
}

/// SplitMix64 finalizer.
inline u64 mix64(u64 z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream for class (q, r) under a master seed.
inline u64 stream_seed(u64 master, u64 q, u64 r) { return mix64(mix64(mix64(master) ^ q) ^ r); }

/// Uniform variates in the open interval (0, 1) on a 53-bit grid, from mt19937_64.
class OpenUniform {
  public:
    explicit OpenUniform(u64 seed) : engine_(seed) {}
    double operator()() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

  private:
    std::mt19937_64 engine_;
};

/// Random-gap trend (phi x / li x) * log(li x / phi).
inline double trend_rand(u64 q, double x) {
    if (!(x > std::exp(1.0))) throw std::domain_error("trend_rand needs x > e");
    const TrendTerms t = trend_terms(q, x);
    return t.a * t.log_n;
}

/// Extreme-value rescaling h = gap / a - log(li x / phi) at x = end.
inline double evt_rescale(u64 gap, double phi, double end) {
    const TrendTerms t(phi, end);
    return static_cast<double>(gap) / t.a - t.log_n;
}

/// Starts at max(2, r) and walks p += ceil(Exp(phi(q) log p)); a record is
/// emitted whenever a gap beats every earlier one and ends at or below limit.
inline std::vector<SimRecord> simulate(const SimConfig& config) {
    if (config.limit < 2) throw std::invalid_argument("simulation limit must be >= 2");
    const ResidueClass& c = config.cls;
    const double phi = static_cast<double>(euler_phi(c.q));
    OpenUniform uniform(stream_seed(config.seed, c.q, c.r));

    std::vector<SimRecord> out;
    u64 p = std::max<u64>(2, c.r);
    u64 record = 0;
    while (p < config.limit) {
        const double draw = std::ceil(exp_sample(uniform(), phi * std::log(static_cast<double>(p))));
        if (draw > static_cast<double>(config.limit - p)) break;
        const u64 g = static_cast<u64>(draw);
        const u64 start = p;
        p += g;
        if (g > record) {
            record = g;
            out.push_back({g, start, p, evt_rescale(g, phi, static_cast<double>(p)), c});
        }
    }
    return out;
}

}  // namespace maxgap
