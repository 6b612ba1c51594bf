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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "poly.hpp"

namespace sievegap {

enum class SystemKind { Eratosthenes, Polynomial, Table, Twin };

// How a polynomial system treats primes p <= deg f. `AllPrimes` uses the actual
// roots (so n^2+1 has I_2 = {1}); `EmptyUpToDegree` forces I_p = {} there, the
// convention used when only prime factors > deg f matter.
enum class SmallPrimeRule { AllPrimes, EmptyUpToDegree };

// A value carried in binary128 together with a bound on its accumulated
// relative rounding error.
struct ExtendedReal {
    __float128 value = 1;
    double rel_error_bound = 0;

    double to_double() const { return static_cast<double>(value); }
};

// A sieving system: a set I_p of forbidden residues for every prime p.
// Residue tables are computed lazily and cached per prime; the cache is safe
// for concurrent readers and writers. Copies share the cache.
class SievingSystem {
public:
    static SievingSystem eratosthenes();
    // I_p = {0, p-2}: the lower-twin-prime system (two-dimensional).
    static SievingSystem twin();
    static SievingSystem polynomial(Polynomial f, SmallPrimeRule rule = SmallPrimeRule::AllPrimes);
    // Listed primes get the given residues, every other prime gets the empty set.
    static SievingSystem table(const std::map<uint64_t, std::vector<uint64_t>>& entries);
    // "eratosthenes", "twin", "poly:<expr>", "poly-strict:<expr>"
    static SievingSystem builtin(std::string_view name);

    SystemKind kind() const;
    const std::string& name() const;
    // Polynomial degree; 0 for the other kinds.
    int degree() const;
    const Polynomial* polynomial_ptr() const;
    SmallPrimeRule small_prime_rule() const;
    bool normalized() const;
    // Unique per constructed system (normalize_shift yields a new id).
    uint64_t id() const;

    // Sorted I_p. Throws DomainError when p is not prime.
    std::span<const uint64_t> residues(uint64_t p) const;
    size_t class_count(uint64_t p) const { return residues(p).size(); }
    bool degenerate_at(uint64_t p) const { return residues(p).size() == p; }

    // Smallest degenerate prime in (lo, hi], if any.
    std::optional<uint64_t> first_degenerate(uint64_t lo, uint64_t hi) const;
    // Throws DomainError naming the first degenerate prime in (lo, hi].
    void require_nondegenerate(uint64_t lo, uint64_t hi, std::string_view context) const;

    // Fills the cache for all primes in (lo, hi], in parallel.
    void materialize(uint64_t lo, uint64_t hi) const;
    void materialize(uint64_t x) const { materialize(0, x); }
    // max |I_p| over primes <= x
    size_t max_class_count(uint64_t x) const;

    // Translate every nonempty I_p so that it contains 0.
    SievingSystem normalize_shift() const;

private:
    struct Impl;
    explicit SievingSystem(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<Impl> impl_;
};

ExtendedReal sigma(const SievingSystem& sys, uint64_t z, uint64_t x);
// Exact rational value of the same product.
mpq_class sigma_exact(const SievingSystem& sys, uint64_t z, uint64_t x);

// Product of primes p in (z, x] with I_p nonempty.
mpz_class period(const SievingSystem& sys, uint64_t z, uint64_t x);
inline mpz_class period(const SievingSystem& sys, uint64_t x) { return period(sys, 1, x); }

// #{p <= x : |I_p| >= 1} / (x / log x)
double estimate_rho(const SievingSystem& sys, uint64_t x);
// #{p <= x : |I_p| >= 1} / pi(x); same limit, much smaller bias at desk scale
double supported_share(const SievingSystem& sys, uint64_t x);

struct DensityReport {
    uint64_t x = 0;
    double sigma = 0;
    double sigma_rel_error = 0;
    uint64_t period_bitlength = 0;
    double rho_hat = 0;
    double rho_share = 0;
    size_t bound_B = 0;
    std::optional<uint64_t> degenerate_prime;
    std::vector<std::pair<uint64_t, double>> mertens_track;  // (x_i, sigma(x_i) log x_i)
    double drift_ratio = 0.1;
    bool one_dimensional = true;
    std::vector<std::string> warnings;
};

// Mertens-type track at the checkpoints (each >= 100, strictly increasing).
// one_dimensional is cleared when the track is monotone and its last step
// moves by more than drift_ratio.
DensityReport mertens_fit(const SievingSystem& sys, const std::vector<uint64_t>& checkpoints,
                          double drift_ratio = 0.1);

// Full report at cutoff x, using the checkpoint ladder x/100, x/10, x (those >= 100).
DensityReport system_info(const SievingSystem& sys, uint64_t x, double drift_ratio = 0.1);

}  // namespace sievegap
