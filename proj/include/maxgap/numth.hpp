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

// Exact 64-bit number theory used by every scan: deterministic primality,
// Euler's totient, walking primes in an arithmetic progression, and the
// logarithmic integral.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace maxgap {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// The progression r, r+q, r+2q, ... with 1 <= r < q and gcd(q, r) = 1.
struct ResidueClass {
    u64 q = 2;
    u64 r = 1;

    ResidueClass() = default;
    ResidueClass(u64 modulus, u64 residue) : q(modulus), r(residue) {
        if (q < 2 || r < 1 || r >= q) {
            throw std::invalid_argument("residue class needs 1 <= r < q, got q=" +
                                        std::to_string(q) + " r=" + std::to_string(r));
        }
        if (std::gcd(q, r) != 1) {
            throw std::invalid_argument("residue class needs gcd(q, r) = 1, got q=" +
                                        std::to_string(q) + " r=" + std::to_string(r));
        }
    }

    friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
    friend auto operator<=>(const ResidueClass&, const ResidueClass&) = default;
};

/// A prime of the progression together with its 1-based rank in it.
struct PrimeInClass {
    u64 value = 0;
    ResidueClass cls;
    u64 index = 0;
};

namespace detail {

// Montgomery arithmetic modulo an odd 64-bit n.
class Montgomery {
  public:
    explicit Montgomery(u64 n) : n_(n) {
        inv_ = n;  // Newton iteration for n^-1 mod 2^64, 6 correct bits per start
        for (int i = 0; i < 5; ++i) inv_ *= 2 - n * inv_;
        const u64 r1 = (0 - n) % n;
        r2_ = static_cast<u64>(static_cast<u128>(r1) * r1 % n);
    }

    u64 reduce(u128 t) const {
        const u64 m = static_cast<u64>(t) * inv_;
        const u64 hi = static_cast<u64>(t >> 64);
        const u64 mn = static_cast<u64>((static_cast<u128>(m) * n_) >> 64);
        return hi >= mn ? hi - mn : hi - mn + n_;
    }
    u64 to(u64 a) const { return reduce(static_cast<u128>(a % n_) * r2_); }
    u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
    u64 pow(u64 base, u64 e) const {
        u64 result = to(1);
        while (e) {
            if (e & 1) result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }

  private:
    u64 n_;
    u64 inv_;
    u64 r2_;
};

inline bool strong_probable_prime(const Montgomery& mont, u64 n, u64 base, u64 d, int s,
                                  u64 one, u64 minus_one) {
    base %= n;
    if (base == 0) return true;
    u64 x = mont.pow(mont.to(base), d);
    if (x == one || x == minus_one) return true;
    for (int i = 1; i < s; ++i) {
        x = mont.mul(x, x);
        if (x == minus_one) return true;
        if (x == one) return false;
    }
    return false;
}

inline u64 checked_add(u64 a, u64 b) {
    if (a > std::numeric_limits<u64>::max() - b) {
        throw std::overflow_error("prime search exceeds the 64-bit integer range");
    }
    return a + b;
}

}  // namespace detail

/// Deterministic for every 64-bit input.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    for (u64 p : kSmall) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 59 * 59) return true;

    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    const detail::Montgomery mont(n);
    const u64 one = mont.to(1);
    const u64 minus_one = mont.to(n - 1);

    // Witness sets: Jaeschke for n < 2^32, Sinclair's seven bases for all of 2^64.
    if (n < (u64{1} << 32)) {
        for (u64 a : {2, 7, 61}) {
            if (!detail::strong_probable_prime(mont, n, a, d, s, one, minus_one)) return false;
        }
        return true;
    }
    for (u64 a : {u64{2}, u64{325}, u64{9375}, u64{28178}, u64{450775}, u64{9780504},
                  u64{1795265022}}) {
        if (!detail::strong_probable_prime(mont, n, a, d, s, one, minus_one)) return false;
    }
    return true;
}

inline u64 euler_phi(u64 q) {
    if (q == 0) throw std::domain_error("euler_phi needs q >= 1");
    u64 result = q;
    for (u64 p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            while (q % p == 0) q /= p;
            result -= result / p;
        }
    }
    if (q > 1) result -= result / q;
    return result;
}

/// Exponential integral Ei(t) for t > 0 from its convergent power series.
/// All terms are positive for t > 0, so the sum carries no cancellation.
inline double exp_integral_ei(double t) {
    if (!(t > 0)) throw std::domain_error("exp_integral_ei needs t > 0");
    long double term = 1.0L;
    long double sum = 0.0L;
    const long double tt = t;
    for (int k = 1; k < 2000; ++k) {
        term *= tt / k;
        const long double add = term / k;
        sum += add;
        if (k > tt && add < sum * 1e-21L) break;
    }
    return static_cast<double>(kEulerGamma + std::log(tt) + sum);
}

/// Logarithmic integral li(x) (principal value), defined for x > 1.
inline double li(double x) {
    if (!(x > 1.0)) throw std::domain_error("li(x) needs x > 1");
    return exp_integral_ei(std::log(x));
}

namespace detail {

// First value >= n in the class, or throws on overflow.
inline u64 first_candidate_at_least(u64 n, const ResidueClass& c) {
    if (n <= c.r) return c.r;
    const u64 rem = (n - c.r) % c.q;
    return rem == 0 ? n : checked_add(n, c.q - rem);
}

// Largest prime <= m, where m is in the class and a class prime <= m is known to exist.
inline u64 step_down_to_prime(u64 m, u64 q) {
    while (!is_prime(m)) m -= q;
    return m;
}

}  // namespace detail

/// Least prime of the progression.
inline u64 pmin(const ResidueClass& c) {
    u64 p = c.r;
    while (!is_prime(p)) p = detail::checked_add(p, c.q);
    return p;
}

/// Smallest prime p > n with p = r (mod q).
inline u64 next_prime_in_class(u64 n, const ResidueClass& c) {
    u64 p = detail::first_candidate_at_least(detail::checked_add(n, 1), c);
    while (!is_prime(p)) p = detail::checked_add(p, c.q);
    return p;
}

/// Largest prime p <= n with p = r (mod q); throws std::domain_error below pmin.
inline u64 prev_prime_in_class(u64 n, const ResidueClass& c) {
    const u64 least = pmin(c);
    if (n < least) {
        throw std::domain_error("no prime of the class lies at or below " + std::to_string(n));
    }
    const u64 m = n - (n - c.r) % c.q;
    return detail::step_down_to_prime(m, c.q);
}

/// Sequential walk over the primes of one progression, in increasing order.
class ClassPrimeWalker {
  public:
    explicit ClassPrimeWalker(ResidueClass c) : cls_(c) {}

    PrimeInClass next() {
        current_ = index_ == 0 ? pmin(cls_) : next_prime_in_class(current_, cls_);
        ++index_;
        return {current_, cls_, index_};
    }

  private:
    ResidueClass cls_;
    u64 current_ = 0;
    u64 index_ = 0;
};

/// The n-th prime (1-based) of the progression.
inline u64 nth_prime_in_class(const ResidueClass& c, u64 n) {
    if (n == 0) throw std::domain_error("nth_prime_in_class needs n >= 1");
    ClassPrimeWalker walk(c);
    u64 p = 0;
    for (u64 i = 0; i < n; ++i) p = walk.next().value;
    return p;
}

}  // namespace maxgap
