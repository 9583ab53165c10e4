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

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "maxgap/records.hpp"
#include "reference_tables.hpp"

namespace maxgap {
namespace {

std::vector<GapRecord> table_records() {
    std::vector<GapRecord> out;
    for (const auto& row : reference::kRecords1000_1) {
        out.push_back({row.start, row.end, row.gap, ResidueClass(1000, 1)});
    }
    return out;
}

TEST(CountRecords, PublishedTable) {
    const auto recs = table_records();
    EXPECT_EQ(count_records(recs, 1'000'000'000), 17u);
    EXPECT_EQ(count_records(recs, 1'000'000'000'000), 27u);
    EXPECT_EQ(count_records(recs, 4000), 0u);
    EXPECT_EQ(count_records(recs, 4001), 1u);
    EXPECT_EQ(count_records(recs, ~u64{0}), recs.size());
    u64 prev = 0;
    for (u64 x = 1; x < 1e13; x = x * 3 + 1) {
        const u64 n = count_records(recs, x);
        ASSERT_GE(n, prev);
        prev = n;
    }
}

TEST(LogBin, Edges) {
    EXPECT_EQ(log_bin(1), 0);
    EXPECT_EQ(log_bin(2), 0);
    EXPECT_EQ(log_bin(3), 1);
    EXPECT_EQ(log_bin(7), 1);
    EXPECT_EQ(log_bin(8), 2);
    EXPECT_EQ(log_bin(22026), 9);   // e^10 = 22026.47
    EXPECT_EQ(log_bin(22027), 10);
    for (u64 n = 1; n < 100'000'000; n = n * 5 / 4 + 1) {
        const int k = log_bin(n);
        ASSERT_LE(std::exp(static_cast<long double>(k)), static_cast<long double>(n));
        ASSERT_GT(std::exp(static_cast<long double>(k + 1)), static_cast<long double>(n));
    }
}

TEST(IntervalCounts, EmptyIntervalAboveOneHundredThousand) {
    const auto recs = table_records();
    const int k = log_bin(100'000);
    // [1e5, e * 1e5] sits inside bins k and k+1; neither holds a record end.
    EXPECT_EQ(k, 11);
    const auto counts = interval_counts(recs, 11, 12);
    EXPECT_EQ(counts[0], 0u);
    EXPECT_EQ(counts[1], 1u);  // 318001 < e^13 lands in bin 12
    EXPECT_EQ(count_records(recs, 271828) - count_records(recs, 99999), 0u);
}

TEST(IntervalCounts, PartitionIdentity) {
    const auto recs = records_of(scan_records(ResidueClass(1000, 1), 1'000'000'000));
    EXPECT_EQ(interval_counts({}, 0, 5), (std::vector<u64>(6, 0)));
    const auto counts = interval_counts(recs, 0, log_bin(1'000'000'000));
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), u64{0}), count_records(recs, 1'000'000'000));
    EXPECT_THROW(interval_counts(recs, 5, 4), std::invalid_argument);
}

TEST(MeanOverClasses, AveragesTwoClasses) {
    const auto m = mean_over_classes(4, 1'000'000, 0, 13);
    const auto a = interval_counts(records_of(scan_records(ResidueClass(4, 1), 1'000'000)), 0, 13);
    const auto b = interval_counts(records_of(scan_records(ResidueClass(4, 3), 1'000'000)), 0, 13);
    ASSERT_EQ(m.mean_counts.size(), 14u);
    for (std::size_t i = 0; i < 14; ++i) {
        EXPECT_DOUBLE_EQ(m.mean_counts[i], (static_cast<double>(a[i]) + static_cast<double>(b[i])) / 2);
    }
    EXPECT_EQ(m.per_class_counts.size(), 2u);
    EXPECT_EQ(m.per_class_counts.at(1), a);
    // e^14 > 1e6, so bin 13 is not fully covered.
    EXPECT_EQ(m.coverage[12], 2u);
    EXPECT_EQ(m.coverage[13], 0u);
    EXPECT_THROW(mean_over_classes(2, 1000, 0, 3), std::invalid_argument);
}

TEST(MeanOverClasses, PrimeModulusAndThreadIndependence) {
    const auto one = mean_over_classes(101, 10'000'000, 4, 16, {}, 1);
    const auto four = mean_over_classes(101, 10'000'000, 4, 16, {}, 4);
    EXPECT_EQ(one.per_class_counts.size(), 100u);
    EXPECT_EQ(one.mean_counts, four.mean_counts);
    EXPECT_EQ(one.per_class_counts, four.per_class_counts);
    for (double v : one.mean_counts) EXPECT_GE(v, 0.0);
}

TEST(Hyperbola, ExactRecovery) {
    std::vector<double> xs, ys;
    for (int k = 5; k <= 25; ++k) {
        xs.push_back(k + 0.5);
        ys.push_back(2.0 - 3.0 / (k + 0.5 - 1.0));
    }
    const HyperbolaFit fit = fit_hyperbola(xs, ys);
    EXPECT_NEAR(fit.kappa, 3.0, 1e-6);
    EXPECT_NEAR(fit.delta, 1.0, 1e-6);
    EXPECT_LT(fit.residual, 1e-9);
    EXPECT_EQ(fit.points, xs.size());
    for (double x : xs) EXPECT_LT(fit(x), 2.0);
}

TEST(Hyperbola, NoisyRecovery) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> xs, ys;
    for (int k = 4; k <= 30; ++k) {
        xs.push_back(k + 0.5);
        ys.push_back(2.0 - 5.0 / (k + 0.5 + 2.0) + noise(rng));
    }
    const HyperbolaFit fit = fit_hyperbola(xs, ys);
    EXPECT_NEAR(fit.kappa, 5.0, 0.5);
    EXPECT_NEAR(fit.delta, -2.0, 1.0);
    EXPECT_LT(fit.residual, 0.02);
}

TEST(Hyperbola, Errors) {
    const std::vector<double> two{1.5, 2.5};
    EXPECT_THROW(fit_hyperbola(two, two), insufficient_data_error);
    const std::vector<double> three{1.5, 2.5, 3.5};
    EXPECT_THROW(fit_hyperbola(three, two), std::invalid_argument);
}

TEST(Hyperbola, DropsUncoveredBins) {
    IntervalCounts m;
    m.k_min = 5;
    m.k_max = 10;
    for (int k = 5; k <= 10; ++k) {
        m.mean_counts.push_back(k == 10 ? 0.0 : 2.0 - 3.0 / (k + 0.5 - 1.0));
        m.coverage.push_back(k == 10 ? 0 : 7);
    }
    const HyperbolaFit fit = fit_hyperbola(m);
    EXPECT_EQ(fit.points, 5u);
    EXPECT_NEAR(fit.kappa, 3.0, 1e-6);
}

TEST(Hyperbola, ClassAverageFitQuality) {
    const auto means = mean_over_classes(1000, 1'000'000'000, 8, 20);
    const HyperbolaFit fit = fit_hyperbola(means);
    EXPECT_LT(fit.residual, 0.3);
}

TEST(Guesstimate, Values) {
    EXPECT_NEAR(guesstimate_N(1000, 1e12), 36.7180335230433, 1e-9);
    EXPECT_GT(guesstimate_N(1000, 1e12), 27.0);
    for (double x : {100.0, 1e6, 1e12}) EXPECT_NEAR(guesstimate_N(2, x), 2 * std::log(li(x)), 1e-12);
    EXPECT_EQ(guesstimate_N(1000, 100.0), 0.0);  // li(100) = 30.1 < 400
    EXPECT_THROW(guesstimate_N(1000, 1.0), std::domain_error);
}

TEST(Monitors, RecordCountsStayBelowTwoLogX) {
    for (u64 q : {97u, 1000u, 4001u}) {
        for (const auto& c : admissible_classes(q)) {
            if (c.r % 7 != 1) continue;
            const auto recs = scan_records(c, 100'000'000);
            EXPECT_LT(static_cast<double>(recs.size()), 2 * std::log(1e8)) << q << " " << c.r;
        }
    }
}

}  // namespace
}  // namespace maxgap
