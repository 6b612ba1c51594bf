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
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "poly.hpp"

namespace sievegap {

struct CompositeRun {
    uint64_t start = 0;
    uint64_t length = 0;
    // values above 2^64 decided by the probabilistic test
    uint64_t probabilistic_tests = 0;
};

// Longest run of n in [1, X] with f(n) not prime (values <= 1 count as not prime);
// ties go to the smallest start.
CompositeRun composite_run_bruteforce(const Polynomial& f, uint64_t X);

struct ConstructedRun {
    uint64_t x = 0;          // sieving range used
    mpz_class period;        // P(x) over primes with nonempty classes
    uint64_t start = 0;      // interval [start, start + length - 1] inside [X/2, X]
    uint64_t length = 0;
    uint64_t baseline_length = 0;  // trivial construction, same x and seed
    bool degenerate = false;
    uint64_t degenerate_prime = 0;
    uint64_t probabilistic_tests = 0;
    std::vector<std::string> warnings;
};

// Largest x >= 10 with P(x) <= X/4, so the constructed run fits in [X/2, X].
uint64_t desk_x_for(const Polynomial& f, uint64_t X);

// Runs the construction for the polynomial system at desk_x_for(X), maps the run into
// [X/2, X] through the CRT position of b and re-checks every f(n) with the primality test.
ConstructedRun composite_run_constructed(const Polynomial& f, uint64_t X, uint64_t seed);

// For each i in 1..k some j != i has gcd(f(n+i), f(n+j)) divisible by a prime > deg f.
bool coprimality_check(const Polynomial& f, const mpz_class& n, uint64_t k);

// Smallest n in [0, bound] passing coprimality_check.
std::optional<uint64_t> coprimality_witness(const Polynomial& f, uint64_t k, uint64_t bound);

struct ConstructedWitness {
    bool found = false;
    mpz_class n;
    uint64_t k = 0;
    uint64_t x = 0;
    uint64_t seed = 0;
    uint64_t gap = 0;  // L of the constructed gap the window came from
    uint64_t target_k = 0;  // floor(2x)
};

// Gap construction for the system with I_p empty for p <= deg f, then the longest
// sub-window of the gap passing coprimality_check. Tries seeds 1..seeds at each x.
ConstructedWitness coprimality_from_construction(const Polynomial& f, const std::vector<uint64_t>& xs,
                                                 uint64_t seed, uint64_t seeds);

}  // namespace sievegap
