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

#include "primes.hpp"

#include <algorithm>
#include <mutex>

namespace sievegap {

namespace {

std::mutex g_table_mutex;
std::vector<uint64_t> g_table;
uint64_t g_table_limit = 0;

std::vector<uint64_t> sieve(uint64_t limit) {
    std::vector<uint64_t> out;
    if (limit < 2) return out;
    // bit i <-> odd number 2i+1
    const uint64_t half = limit / 2 + 1;
    std::vector<bool> composite(half, false);
    out.push_back(2);
    for (uint64_t i = 1; i < half; ++i) {
        if (composite[i]) continue;
        const uint64_t p = 2 * i + 1;
        if (p > limit) break;
        out.push_back(p);
        for (uint64_t m = p * p; m <= limit; m += 2 * p) composite[m / 2] = true;
    }
    return out;
}

void ensure_table(uint64_t limit) {
    if (limit <= g_table_limit) return;
    uint64_t target = std::max<uint64_t>(limit, 2 * g_table_limit);
    target = std::max<uint64_t>(target, 1 << 16);
    g_table = sieve(target);
    g_table_limit = target;
}

}  // namespace

std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi) {
    if (hi <= lo || hi < 2) return {};
    std::lock_guard lock(g_table_mutex);
    ensure_table(hi);
    auto first = std::upper_bound(g_table.begin(), g_table.end(), lo);
    auto last = std::upper_bound(g_table.begin(), g_table.end(), hi);
    return {first, last};
}

std::vector<uint64_t> primes_up_to(uint64_t limit) { return primes_in(0, limit); }

uint64_t prime_count(uint64_t limit) {
    if (limit < 2) return 0;
    std::lock_guard lock(g_table_mutex);
    ensure_table(limit);
    return static_cast<uint64_t>(std::upper_bound(g_table.begin(), g_table.end(), limit) -
                                 g_table.begin());
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    if (m == 1) return 0;
    uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

uint64_t invmod(uint64_t a, uint64_t p) {
    a %= p;
    if (a == 0) throw DomainError("invmod: zero has no inverse mod " + std::to_string(p));
    // extended Euclid, works for any coprime modulus
    __int128 t = 0, new_t = 1;
    __int128 r = p, new_r = a;
    while (new_r != 0) {
        __int128 q = r / new_r;
        __int128 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw DomainError("invmod: not invertible");
    if (t < 0) t += p;
    return static_cast<uint64_t>(t);
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    static constexpr uint64_t kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (uint64_t p : kSmall) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Jim Sinclair's base set: deterministic below 2^64.
    static constexpr uint64_t kBases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    for (uint64_t a : kBases) {
        a %= n;
        if (a == 0) continue;
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimalityVerdict check_prime(const mpz_class& n) {
    if (n < 2) return {false, false};
    if (mpz_fits_ulong_p(n.get_mpz_t())) {
        return {is_prime_u64(n.get_ui()), false};
    }
    for (uint64_t p : primes_up_to(1000)) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return {false, true};
    }
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    const mpz_class n_minus_1 = n - 1;
    // fixed base sequence keeps the verdict reproducible
    uint64_t state = 0x9E3779B97F4A7C15ull;
    for (int round = 0; round < 64; ++round) {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        mpz_class a = mpz_class(static_cast<unsigned long>(z % 0xFFFFFFFFull)) + 2;
        mpz_class x;
        mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == n_minus_1) continue;
        bool composite = true;
        for (unsigned long r = 1; r < s; ++r) {
            mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
            if (x == n_minus_1) {
                composite = false;
                break;
            }
        }
        if (composite) return {false, true};
    }
    return {true, true};
}

}  // namespace sievegap
