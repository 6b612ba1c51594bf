// Copyright 2026 The sievegap Authors
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
#include <vector>

namespace sievegap {

// Process-wide worker cap; 0 means hardware concurrency.
void set_thread_cap(unsigned cap);
unsigned thread_cap();

// set inside workers; nested parallel_for calls run serially
inline thread_local bool tl_in_worker = false;

// Runs body(i) for i in [0, n). Iterations must write to disjoint outputs; the
// first exception thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_for(size_t n, Body&& body) {
    const unsigned workers = tl_in_worker ? 1u : static_cast<unsigned>(std::min<size_t>(thread_cap(), n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        const bool outer = tl_in_worker;
        tl_in_worker = true;
        struct Reset {
            bool v;
            ~Reset() { tl_in_worker = v; }
        } reset{outer};
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Pairwise sum with a fixed tree shape, so the result is independent of how
// the terms were produced.
template <class T>
T pairwise_sum(const T* data, size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T s = data[0];
        for (size_t i = 1; i < n; ++i) s += data[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace sievegap
