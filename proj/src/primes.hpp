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
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace sievegap {

// Raised when an operation is mathematically ill-posed for its input
// (degenerate prime in range, non-prime modulus, table too large, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for malformed requests: bad flags, unparsable text, violated preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// All primes <= limit, ascending. Backed by a process-wide cache that only grows.
std::vector<uint64_t> primes_up_to(uint64_t limit);

// Primes p with lo < p <= hi.
std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi);

// Number of primes <= limit.
uint64_t prime_count(uint64_t limit);

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);

// Inverse of a modulo prime p; a must be nonzero mod p.
uint64_t invmod(uint64_t a, uint64_t p);

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(uint64_t n);

struct PrimalityVerdict {
    bool prime = false;
    // true when the input exceeded 64 bits and a probabilistic test decided it
    bool probabilistic = false;
};

// Primality of an arbitrary nonnegative integer. Inputs above 2^64 get a
// trial-division prefilter followed by 64 Miller-Rabin rounds.
PrimalityVerdict check_prime(const mpz_class& n);

}  // namespace sievegap
