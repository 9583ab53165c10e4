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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "maxgap/numth.hpp"

namespace maxgap {

/// All admissible residues r in [1, q-1] with gcd(q, r) = 1, in increasing order.
inline std::vector<ResidueClass> admissible_classes(u64 q) {
    std::vector<ResidueClass> out;
    out.reserve(static_cast<std::size_t>(euler_phi(q)));
    for (u64 r = 1; r < q; ++r) {
        if (std::gcd(q, r) == 1) out.emplace_back(q, r);
    }
    return out;
}

/// Applies fn to every index in [0, count) on a bounded pool of workers and
/// returns the results in index order. The first exception thrown by a task is
/// rethrown after all workers have stopped.
template <typename Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn)
    -> std::vector<std::invoke_result_t<Fn, std::size_t>> {
    using Result = std::invoke_result_t<Fn, std::size_t>;
    std::vector<Result> results(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace maxgap
