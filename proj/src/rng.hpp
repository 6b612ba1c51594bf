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

#include <cstdint>
#include <random>

namespace sievegap {

// Seed used when neither --seed nor SIEVEGAP_SEED is given.
inline constexpr uint64_t kDefaultSeed = 20170601ull;

// Stream tags; every random consumer draws from its own substream so results
// do not depend on evaluation order or thread count.
enum class Stream : uint64_t {
    Stage1 = 1,
    Stage2 = 2,
    Stage3 = 3,
    CoverPartition = 4,
    CoverEdge = 5,
    Trial = 6,
    Fixture = 7,
    Baseline = 8,
};

inline uint64_t splitmix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, Stream tag, uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(static_cast<uint64_t>(tag))) + index);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng substream(uint64_t master, Stream tag, uint64_t index) {
        return Rng(derive_seed(master, tag, index));
    }

    uint64_t next() { return engine_(); }

    // Uniform in [0, n), n > 0. Lemire's multiply-shift with rejection, portable across
    // standard libraries (std::uniform_int_distribution is not).
    uint64_t below(uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<uint64_t>(m);
        if (low < n) {
            const uint64_t threshold = -n % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace sievegap
