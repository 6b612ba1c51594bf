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

#include "applications.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include "construction.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "sieve_system.hpp"

namespace sievegap {

namespace {

mpz_class from_i128(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    mpz_class hi = static_cast<unsigned long>(static_cast<uint64_t>(u >> 64));
    mpz_class out = hi << 64;
    out += static_cast<unsigned long>(static_cast<uint64_t>(u));
    return neg ? mpz_class(-out) : out;
}

// true when value is not a prime; counts probabilistic decisions
bool not_prime(__int128 v, std::atomic<uint64_t>& probabilistic) {
    if (v <= 1) return true;
    if (v <= static_cast<__int128>(UINT64_MAX)) return !is_prime_u64(static_cast<uint64_t>(v));
    const auto verdict = check_prime(from_i128(v));
    if (verdict.probabilistic) probabilistic.fetch_add(1);
    return !verdict.prime;
}

bool not_prime(const mpz_class& v, uint64_t& probabilistic) {
    if (v <= 1) return true;
    const auto verdict = check_prime(v);
    if (verdict.probabilistic) ++probabilistic;
    return !verdict.prime;
}

void require_positive_leading(const Polynomial& f) {
    if (f.degree() < 1) throw InvalidArgument("polynomial must have degree >= 1");
    if (f.leading_sign() <= 0) throw InvalidArgument("polynomial must have a positive leading coefficient");
}

// has a prime factor above d
bool large_factor(mpz_class g, int d) {
    if (g == 0) return true;
    g = abs(g);
    for (uint64_t p : primes_up_to(static_cast<uint64_t>(std::max(d, 1)))) {
        while (mpz_divisible_ui_p(g.get_mpz_t(), p)) g /= static_cast<unsigned long>(p);
    }
    return g > 1;
}

// partner[i] lists j != i in [0, k) sharing a prime > d with i
std::vector<std::vector<uint32_t>> partners(const std::vector<mpz_class>& vals, int d) {
    const size_t k = vals.size();
    std::vector<std::vector<uint32_t>> out(k);
    std::vector<std::vector<char>> share(k, std::vector<char>(k, 0));
    parallel_for(k, [&](size_t i) {
        for (size_t j = i + 1; j < k; ++j) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), vals[i].get_mpz_t(), vals[j].get_mpz_t());
            share[i][j] = large_factor(g, d);
        }
    });
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            if (share[i][j]) {
                out[i].push_back(static_cast<uint32_t>(j));
                out[j].push_back(static_cast<uint32_t>(i));
            }
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
}

bool has_partner_in(const std::vector<uint32_t>& ps, uint32_t a, uint32_t c) {
    auto it = std::lower_bound(ps.begin(), ps.end(), a);
    return it != ps.end() && *it <= c;
}

}  // namespace

CompositeRun composite_run_bruteforce(const Polynomial& f, uint64_t X) {
    require_positive_leading(f);
    if (X < 1 || X > 100000000) throw InvalidArgument("composite runs: need 1 <= X <= 1e8");
    constexpr uint64_t kChunk = uint64_t{1} << 16;
    const uint64_t chunks = (X + kChunk - 1) / kChunk;
    std::vector<uint64_t> words((X + 63) / 64, 0);  // bit n-1 set when f(n) is not prime
    std::atomic<uint64_t> probabilistic{0};
    std::atomic<uint64_t> overflow_at{0};
    parallel_for(chunks, [&](size_t c) {
        const uint64_t lo = c * kChunk + 1;
        const uint64_t hi = std::min(X, lo + kChunk - 1);
        for (uint64_t n = lo; n <= hi; ++n) {
            const auto v = f.eval_i128(static_cast<int64_t>(n));
            if (!v) {
                uint64_t expected = 0;
                overflow_at.compare_exchange_strong(expected, n);
                return;
            }
            if (not_prime(*v, probabilistic)) words[(n - 1) >> 6] |= uint64_t{1} << ((n - 1) & 63);
        }
    });
    if (overflow_at.load() != 0) {
        throw DomainError("composite runs: f(n) overflows 128 bits at n=" + std::to_string(overflow_at.load()));
    }
    CompositeRun best;
    uint64_t run = 0;
    for (uint64_t n = 1; n <= X; ++n) {
        if ((words[(n - 1) >> 6] >> ((n - 1) & 63)) & 1) {
            ++run;
            if (run > best.length) {
                best.length = run;
                best.start = n - run + 1;
            }
        } else {
            run = 0;
        }
    }
    best.probabilistic_tests = probabilistic.load();
    return best;
}

uint64_t desk_x_for(const Polynomial& f, uint64_t X) {
    auto sys = SievingSystem::polynomial(f, SmallPrimeRule::AllPrimes);
    const mpz_class limit = mpz_class(static_cast<unsigned long>(X / 4));
    if (period(sys, 10) > limit) throw DomainError("composite runs: X is too small for x >= 10");
    uint64_t x = 10;
    mpz_class P = period(sys, x);
    for (uint64_t p : primes_in(10, 1000000)) {
        if (sys.class_count(p) > 0) {
            P *= static_cast<unsigned long>(p);
            if (P > limit) return p - 1;
        }
        x = p;
    }
    return x;
}

ConstructedRun composite_run_constructed(const Polynomial& f, uint64_t X, uint64_t seed) {
    require_positive_leading(f);
    ConstructedRun out;
    auto sys = SievingSystem::polynomial(f, SmallPrimeRule::AllPrimes);
    const uint64_t half = (X + 1) / 2;

    // a prime dividing every value is at most deg f
    if (auto p = sys.first_degenerate(0, static_cast<uint64_t>(f.degree()) + 1)) {
        // p | f(n) for every n: the window qualifies wherever |f(n)| > p
        out.degenerate = true;
        out.degenerate_prime = *p;
        out.warnings.push_back("system is degenerate at p=" + std::to_string(*p));
        uint64_t run = 0;
        for (uint64_t n = half; n <= X; ++n) {
            const mpz_class v = f.eval(mpz_class(static_cast<unsigned long>(n)));
            if (not_prime(v, out.probabilistic_tests)) {
                if (++run > out.length) {
                    out.length = run;
                    out.start = n - run + 1;
                }
            } else {
                run = 0;
            }
        }
        return out;
    }

    out.x = desk_x_for(f, X);
    const auto params = derive_params(sys, out.x);
    for (const auto& w : params.warnings) out.warnings.push_back(w);
    const auto r = construct(sys, params, seed, Stage2Mode::Sample);
    out.baseline_length = trivial_baseline(sys, out.x, seed).L;

    mpz_class P = 1;
    for (const auto& [p, _] : r.shift.entries()) P *= static_cast<unsigned long>(p);
    out.period = P;
    const mpz_class b = r.shift.to_integer();
    // gap position n <-> m = n - b (mod P); p | f(m) for some p <= x
    mpz_class offset = mpz_class(1) - b - static_cast<unsigned long>(half);
    mpz_fdiv_r(offset.get_mpz_t(), offset.get_mpz_t(), P.get_mpz_t());
    const mpz_class m0 = offset + static_cast<unsigned long>(half);
    out.start = m0.get_ui();
    out.length = r.L;
    if (out.start + out.length - 1 > X) {
        out.length = out.start > X ? 0 : X - out.start + 1;
        out.warnings.push_back("run truncated at X");
    }
    for (uint64_t i = 0; i < out.length; ++i) {
        const mpz_class v = f.eval(mpz_class(static_cast<unsigned long>(out.start + i)));
        if (!not_prime(v, out.probabilistic_tests)) {
            throw std::logic_error("composite_run_constructed: f(" + std::to_string(out.start + i) + ") is prime");
        }
    }
    return out;
}

bool coprimality_check(const Polynomial& f, const mpz_class& n, uint64_t k) {
    if (k < 2) throw InvalidArgument("coprimality: need k >= 2");
    std::vector<mpz_class> vals(k);
    for (uint64_t i = 0; i < k; ++i) vals[i] = f.eval(n + static_cast<unsigned long>(i + 1));
    const auto pr = partners(vals, f.degree());
    return std::all_of(pr.begin(), pr.end(), [](const auto& v) { return !v.empty(); });
}

std::optional<uint64_t> coprimality_witness(const Polynomial& f, uint64_t k, uint64_t bound) {
    if (k < 2) throw InvalidArgument("coprimality: need k >= 2");
    if (f.degree() < 1) throw InvalidArgument("coprimality: f must be non-constant");
    const int d = f.degree();
    // values f(n+1..n+k) slide; pair (i, j) results are recomputed per n, which is
    // cheap at the bounds this is meant for
    std::vector<mpz_class> vals;
    for (uint64_t n = 0; n <= bound; ++n) {
        if (n == 0) {
            for (uint64_t i = 1; i <= k; ++i) vals.push_back(f.eval(mpz_class(static_cast<unsigned long>(i))));
        } else {
            vals.erase(vals.begin());
            vals.push_back(f.eval(mpz_class(static_cast<unsigned long>(n + k))));
        }
        bool ok = true;
        for (uint64_t i = 0; i < k && ok; ++i) {
            bool found = false;
            for (uint64_t j = 0; j < k && !found; ++j) {
                if (j == i) continue;
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), vals[i].get_mpz_t(), vals[j].get_mpz_t());
                found = large_factor(g, d);
            }
            ok = found;
        }
        if (ok) return n;
    }
    return std::nullopt;
}

ConstructedWitness coprimality_from_construction(const Polynomial& f, const std::vector<uint64_t>& xs, uint64_t seed,
                                                 uint64_t seeds) {
    if (f.degree() < 1) throw InvalidArgument("coprimality: f must be non-constant");
    auto sys = SievingSystem::polynomial(f, SmallPrimeRule::EmptyUpToDegree);
    ConstructedWitness best;
    for (uint64_t x : xs) {
        const auto params = derive_params(sys, x);
        for (uint64_t s = 0; s < seeds; ++s) {
            const uint64_t run_seed = derive_seed(seed, Stream::Trial, s);
            const auto r = construct(sys, params, run_seed, Stage2Mode::Sample);
            if (r.L < 2) continue;
            mpz_class P = 1;
            for (const auto& [p, _] : r.shift.entries()) P *= static_cast<unsigned long>(p);
            mpz_class n0 = -r.shift.to_integer();
            mpz_fdiv_r(n0.get_mpz_t(), n0.get_mpz_t(), P.get_mpz_t());
            std::vector<mpz_class> vals(r.L);
            for (uint64_t i = 0; i < r.L; ++i) vals[i] = f.eval(n0 + static_cast<unsigned long>(i + 1));
            const auto pr = partners(vals, f.degree());
            const auto L = static_cast<uint32_t>(r.L);
            for (uint32_t a = 0; a < L; ++a) {
                for (uint32_t c = L - 1; c > a && c - a + 1 > best.k; --c) {
                    bool ok = true;
                    for (uint32_t i = a; i <= c && ok; ++i) ok = has_partner_in(pr[i], a, c);
                    if (!ok) continue;
                    best.found = true;
                    best.k = c - a + 1;
                    best.n = n0 + a;
                    best.x = x;
                    best.seed = run_seed;
                    best.gap = r.L;
                    best.target_k = 2 * x;
                    break;
                }
            }
        }
    }
    if (best.found && !coprimality_check(f, best.n, best.k)) {
        throw std::logic_error("coprimality_from_construction: window failed its re-check");
    }
    return best;
}

}  // namespace sievegap
