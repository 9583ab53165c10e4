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

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "maxgap/numth.hpp"

namespace maxgap {
namespace {

std::vector<bool> sieve(std::size_t n) {
    std::vector<bool> composite(n + 1, false);
    composite[0] = composite[1] = true;
    for (std::size_t i = 2; i * i <= n; ++i) {
        if (composite[i]) continue;
        for (std::size_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return composite;
}

// li(x) - li(2) as the integral of e^s / s over [log 2, log x].
long double li_quadrature(long double x) {
    auto f = [](long double s) { return std::exp(s) / s; };
    return boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(
        f, std::log(2.0L), std::log(x), 15, 1e-14L);
}

TEST(IsPrime, SmallValues) {
    EXPECT_FALSE(is_prime(0));
    EXPECT_FALSE(is_prime(1));
    EXPECT_TRUE(is_prime(2));
    EXPECT_TRUE(is_prime(3));
    EXPECT_FALSE(is_prime(4));
    EXPECT_TRUE(is_prime(897783067));
    EXPECT_TRUE(is_prime(897849649));
}

TEST(IsPrime, MatchesSieveUpToTenMillion) {
    constexpr std::size_t kN = 10'000'000;
    const auto composite = sieve(kN);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n <= kN; ++n) {
        if (is_prime(n) == composite[n]) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0u);
}

TEST(IsPrime, StrongPseudoprimesAndLargeValues) {
    // Strong pseudoprimes to several small bases.
    for (u64 n : {2047ULL, 3215031751ULL, 2152302898747ULL, 3474749660383ULL, 341550071728321ULL,
                  3825123056546413051ULL}) {
        EXPECT_FALSE(is_prime(n)) << n;
    }
    EXPECT_TRUE(is_prime(18446744073709551557ULL));  // largest 64-bit prime
    EXPECT_FALSE(is_prime(18446744073709551615ULL));
    EXPECT_TRUE(is_prime(4294967291ULL));
    EXPECT_FALSE(is_prime(4294967291ULL * 3ULL));
    EXPECT_FALSE(is_prime(4294967279ULL * 4294967291ULL));  // product of two primes near 2^32
}

TEST(IsPrime, AgreesWithTrialDivisionNearTwoToThe40) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 300; ++i) {
        const u64 n = (u64{1} << 40) + (rng() % 1'000'000);
        bool expect = n > 1;
        for (u64 d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                expect = false;
                break;
            }
        }
        EXPECT_EQ(is_prime(n), expect) << n;
    }
}

TEST(EulerPhi, KnownValues) {
    EXPECT_EQ(euler_phi(1), 1u);
    EXPECT_EQ(euler_phi(2), 1u);
    EXPECT_EQ(euler_phi(1000), 400u);
    EXPECT_EQ(euler_phi(486), 162u);
    EXPECT_EQ(euler_phi(1605), 848u);
    EXPECT_EQ(euler_phi(2005), 1600u);
    EXPECT_EQ(euler_phi(2085), 1104u);
    EXPECT_EQ(euler_phi(4227), 2816u);
    EXPECT_EQ(euler_phi(4279), 3880u);
    EXPECT_EQ(euler_phi(10007), 10006u);
    EXPECT_THROW(euler_phi(0), std::domain_error);
}

TEST(EulerPhi, MatchesGcdCount) {
    for (u64 q = 1; q <= 600; ++q) {
        u64 count = 0;
        for (u64 m = 1; m <= q; ++m) count += std::gcd(m, q) == 1;
        ASSERT_EQ(euler_phi(q), count) << q;
    }
}

TEST(EulerPhi, OddModulusEqualsDouble) {
    for (u64 q = 1; q <= 10'000; q += 2) ASSERT_EQ(euler_phi(q), euler_phi(2 * q)) << q;
}

TEST(Li, AnchorAndFrozenValues) {
    EXPECT_NEAR(li(2), 1.04516378011749, 1e-12);
    const std::pair<double, double> frozen[] = {
        {1e3, 177.609657990152},
        {1e6, 78627.5491594622},
        {1e9, 50849234.9570018},
        {1e12, 37607950280.8049},
    };
    for (auto [x, v] : frozen) EXPECT_NEAR(li(x) / v, 1.0, 1e-12) << x;
}

TEST(Li, MatchesQuadratureOracle) {
    const long double li2 = li(2);
    for (double x : {1e3, 1e6, 1e9, 1e12}) {
        const long double oracle = li2 + li_quadrature(x);
        EXPECT_NEAR(li(x) / static_cast<double>(oracle), 1.0, 1e-9) << x;
    }
}

TEST(Li, StrictlyIncreasingAndDomain) {
    double prev = li(1.0001);
    for (double x = 1.01; x < 1e13; x *= 1.37) {
        const double v = li(x);
        ASSERT_GT(v, prev) << x;
        prev = v;
    }
    EXPECT_THROW(li(1.0), std::domain_error);
    EXPECT_THROW(li(0.5), std::domain_error);
    EXPECT_LT(li(1.4), 0.0);  // the zero of li is at 1.4513...
    EXPECT_GT(li(1.5), 0.0);
}

TEST(ResidueClass, Validation) {
    EXPECT_NO_THROW(ResidueClass(2, 1));
    EXPECT_THROW(ResidueClass(1000, 0), std::invalid_argument);
    EXPECT_THROW(ResidueClass(1000, 1000), std::invalid_argument);
    EXPECT_THROW(ResidueClass(1000, 5), std::invalid_argument);
    EXPECT_THROW(ResidueClass(1, 1), std::invalid_argument);
}

TEST(ClassPrimes, Examples) {
    EXPECT_EQ(pmin(ResidueClass(2, 1)), 3u);
    EXPECT_EQ(pmin(ResidueClass(1000, 1)), 3001u);
    EXPECT_EQ(pmin(ResidueClass(486, 127)), 127u);
    EXPECT_EQ(next_prime_in_class(3001, ResidueClass(1000, 1)), 4001u);
    EXPECT_EQ(next_prime_in_class(0, ResidueClass(2, 1)), 3u);
    EXPECT_EQ(next_prime_in_class(4001, ResidueClass(1000, 1)), 7001u);
    EXPECT_EQ(prev_prime_in_class(7000, ResidueClass(1000, 1)), 4001u);
    EXPECT_EQ(prev_prime_in_class(3001, ResidueClass(1000, 1)), 3001u);
    EXPECT_THROW(prev_prime_in_class(100, ResidueClass(1000, 1)), std::domain_error);
    EXPECT_THROW(next_prime_in_class(18446744073709551557ULL, ResidueClass(2, 1)),
                 std::overflow_error);
}

TEST(ClassPrimes, NthPrime) {
    const ResidueClass c(486, 127);
    EXPECT_EQ(nth_prime_in_class(c, 1), 127u);
    EXPECT_EQ(nth_prime_in_class(c, 282866), 897783067u);
    EXPECT_EQ(nth_prime_in_class(c, 282867), 897849649u);
}

TEST(ClassPrimes, WalkerMatchesSieveAndIsIncreasing) {
    const auto composite = sieve(200'000);
    for (u64 q : {2, 3, 10, 30, 97}) {
        for (u64 r = 1; r < q; ++r) {
            if (std::gcd(q, r) != 1) continue;
            const ResidueClass c(q, r);
            ClassPrimeWalker walk(c);
            u64 index = 0;
            for (u64 n = r; n <= 200'000; n += q) {
                if (composite[n]) continue;
                const auto p = walk.next();
                ++index;
                ASSERT_EQ(p.value, n);
                ASSERT_EQ(p.index, index);
                ASSERT_EQ(p.cls, c);
            }
        }
    }
}

TEST(ClassPrimes, NextOfPrevExceedsN) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const u64 q = 2 + rng() % 500;
        u64 r = 1 + rng() % (q - 1);
        while (std::gcd(q, r) != 1) r = 1 + rng() % (q - 1);
        const ResidueClass c(q, r);
        const u64 n = pmin(c) + rng() % 1'000'000;
        const u64 prev = prev_prime_in_class(n, c);
        ASSERT_LE(prev, n);
        ASSERT_TRUE(is_prime(prev));
        ASSERT_EQ(prev % q, r);
        ASSERT_GT(next_prime_in_class(prev, c), n);
    }
}

}  // namespace
}  // namespace maxgap
