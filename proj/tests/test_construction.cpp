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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "construction.hpp"
#include "parallel.hpp"
#include "primes.hpp"

using namespace sievegap;

namespace {

// brute force membership: n - b_p mod p outside I_p for every prime in (lo, hi]
bool oracle_member(const SievingSystem& sys, const ShiftVector& b, int64_t n, uint64_t lo, uint64_t hi) {
    for (uint64_t p = lo + 1; p <= hi; ++p) {
        bool prime = p >= 2;
        for (uint64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
        if (!prime) continue;
        const auto pi = static_cast<int64_t>(p);
        const int64_t r = (((n - static_cast<int64_t>(b.get(p))) % pi) + pi) % pi;
        for (uint64_t c : sys.residues(p))
            if (static_cast<int64_t>(c) == r) return false;
    }
    return true;
}

double oracle_sigma(const SievingSystem& sys, uint64_t lo, uint64_t hi) {
    double s = 1;
    for (uint64_t p = lo + 1; p <= hi; ++p) {
        bool prime = p >= 2;
        for (uint64_t d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
        if (prime) s *= 1.0 - static_cast<double>(sys.residues(p).size()) / static_cast<double>(p);
    }
    return s;
}

double oracle_lambda(const SievingSystem& sys, const ShiftVector& b, double H, uint64_t hm, uint64_t q, int64_t n,
                     int K, uint64_t z) {
    const auto J = static_cast<uint64_t>(std::floor(K * H + 1e-9));
    int size = 0;
    for (uint64_t h = 1; h <= J; ++h) {
        const int64_t m = n + static_cast<int64_t>(q * h);
        if (!oracle_member(sys, b, m, 0, hm)) continue;
        ++size;
        if (!oracle_member(sys, b, m, hm, z)) return 0;
    }
    return std::pow(oracle_sigma(sys, hm, z), -size);
}

}  // namespace

TEST_CASE("derive_params follows the parameter formulas") {
    auto sys = SievingSystem::eratosthenes();
    ConstructionOptions o;
    o.delta = 0.2;
    auto P = derive_params(sys, 10000, o);
    const long double lx = std::log(10000.0L);
    const auto y = static_cast<uint64_t>(std::ceil(10000.0L * std::pow(lx, 0.2L)));
    CHECK(y == 15591);
    CHECK(P.y == y);
    const auto z = static_cast<uint64_t>(std::llround(static_cast<long double>(y) * std::log(lx) / std::sqrt(lx)));
    CHECK(P.z == z);
    CHECK(P.z == 11407);
    // 2y/x > y/(xi z) here, so the formula's scale range is empty
    CHECK(P.degraded);
    CHECK(P.scales.empty());
    CHECK(P.z_used <= P.x / 2);
}

TEST_CASE("derive_params validates and fills forced scales") {
    auto sys = SievingSystem::eratosthenes();
    ConstructionOptions o;
    o.delta = 0.2;
    o.force_z = 1000;
    o.force_scales = {4, 4.4};
    auto P = derive_params(sys, 10000, o);
    REQUIRE(P.scales.size() == 2);
    std::set<uint64_t> seen;
    for (const auto& g : P.scales) {
        CHECK(g.hm == std::min<uint64_t>(static_cast<uint64_t>(std::floor(std::pow(g.H, 4.6))), 1000));
        CHECK(g.primes.size() <= g.target_count);
        CHECK(!g.primes.empty());
        for (uint64_t q : g.primes) {
            CHECK(is_prime_u64(q));
            CHECK(static_cast<double>(q) > static_cast<double>(P.y) / (P.xi * g.H));
            CHECK(static_cast<double>(q) <= static_cast<double>(P.y) / g.H);
            CHECK(q > P.z_used);
            CHECK(seen.insert(q).second);
        }
        // smallest first
        CHECK(std::is_sorted(g.primes.begin(), g.primes.end()));
    }
    o.M = 4.1;
    CHECK_THROWS_AS(derive_params(sys, 10000, o), InvalidArgument);
    o.M = 4.6;
    o.K = 1;
    CHECK_THROWS_AS(derive_params(sys, 10000, o), InvalidArgument);
    o.K = 3;
    o.delta = 0.6;
    CHECK_THROWS_AS(derive_params(sys, 10000, o), InvalidArgument);
}

TEST_CASE("tiny x is degraded") {
    auto P = derive_params(SievingSystem::eratosthenes(), 100);
    CHECK(P.degraded);
    CHECK(P.scales.empty());
    CHECK(!P.warnings.empty());
    CHECK(P.delta > 0);
    CHECK(P.delta < P.c_rho);
}

TEST_CASE("stage1 is deterministic and uniform") {
    auto sys = SievingSystem::eratosthenes();
    auto a = stage1_uniform(sys, 200, 7);
    set_thread_cap(1);
    auto b = stage1_uniform(sys, 200, 7);
    set_thread_cap(0);
    CHECK(a == b);
    CHECK(a.size() == primes_up_to(200).size());
    // draw for p is independent of z
    auto c = stage1_uniform(sys, 50, 7);
    for (const auto& [p, r] : c.entries()) CHECK(a.get(p) == r);

    const std::map<uint64_t, double> crit = {{2, 10.828}, {3, 13.816}, {5, 18.467}, {7, 22.458}, {11, 29.588},
                                             {13, 32.909}};
    std::map<uint64_t, std::vector<int>> counts;
    for (const auto& [p, _] : crit) counts[p].assign(p, 0);
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        auto v = stage1_uniform(sys, 13, static_cast<uint64_t>(s));
        for (const auto& [p, _] : crit) ++counts[p][v.get(p)];
    }
    for (const auto& [p, limit] : crit) {
        const double e = static_cast<double>(draws) / static_cast<double>(p);
        double chi = 0;
        for (int k : counts[p]) chi += (k - e) * (k - e) / e;
        CAPTURE(p);
        CHECK(chi < limit);
    }
    const double frac2 = counts[2][0] / static_cast<double>(draws);
    CHECK(std::abs(frac2 - 0.5) < 0.03);
}

TEST_CASE("compute_AP") {
    auto sys = SievingSystem::eratosthenes();
    auto b = stage1_uniform(sys, 50, 3);
    // nothing at or below hm = 1
    auto all = compute_AP(sys, b, 1, 101, 5, 6);
    REQUIRE(all.size() == 6);
    for (size_t h = 0; h < 6; ++h) CHECK(all[h] == 5 + 101 * static_cast<int64_t>(h + 1));
    CHECK(compute_AP(sys, b, 10, 101, 5, 0).empty());

    ShiftVector zero(2);
    zero.set(2, 0);
    for (int64_t n = -20; n < 20; ++n) {
        for (int64_t m : compute_AP(sys, zero, 2, 7, n, 9)) CHECK(m % 2 != 0);
    }
    for (int64_t n = -40; n < 40; ++n) {
        auto ap = compute_AP(sys, b, 13, 37, n, 9);
        std::vector<int64_t> want;
        for (int64_t h = 1; h <= 9; ++h)
            if (oracle_member(sys, b, n + 37 * h, 0, 13)) want.push_back(n + 37 * h);
        CHECK(ap == want);
    }
}

TEST_CASE("weight_lambda matches the definition") {
    Rng rng(11);
    for (const char* name : {"eratosthenes", "poly:n^2+1", "twin"}) {
        auto sys = SievingSystem::builtin(name);
        auto b = stage1_uniform(sys, 13, rng.next());
        for (int t = 0; t < 200; ++t) {
            const double H = 1.0 + static_cast<double>(rng.below(3));
            const uint64_t hm = 2 + rng.below(4);
            const uint64_t q = 17 + rng.below(40);
            const int64_t n = static_cast<int64_t>(rng.below(200)) - 100;
            const double got = weight_lambda(sys, b, H, hm, q, n, 3, 13);
            CHECK(got == doctest::Approx(oracle_lambda(sys, b, H, hm, q, n, 3, 13)).epsilon(1e-12));
        }
    }
    auto sys = SievingSystem::eratosthenes();
    auto b = stage1_uniform(sys, 13, 5);
    // J = floor(K H) = 0 gives the empty progression
    CHECK(weight_lambda(sys, b, 0.2, 2, 17, 4, 3, 13) == 1.0);
    int zeros = 0;
    for (int64_t n = 0; n < 100; ++n) zeros += weight_lambda(sys, b, 2, 3, 17, n, 3, 13) == 0.0;
    CHECK(zeros > 0);
}

TEST_CASE("weight_table agrees with weight_lambda") {
    auto sys = SievingSystem::eratosthenes();
    auto b = stage1_uniform(sys, 13, 9);
    const uint64_t y = 60;
    auto ctx = make_scale_context(sys, b, 2, 3, 3, y, 13);
    CHECK(ctx.J == 6);
    CHECK(ctx.sigma2 == doctest::Approx(oracle_sigma(sys, 3, 13)));
    auto t = weight_table(ctx, 29);
    REQUIRE(t.values.size() == 4 * y);
    CHECK(t.n_lo == -179);
    double sum = 0;
    for (size_t k = 0; k < t.values.size(); ++k) {
        const int64_t n = t.n_lo + static_cast<int64_t>(k);
        CHECK(t.values[k] == doctest::Approx(weight_lambda(sys, b, 2, 3, 29, n, 3, 13)));
        sum += t.values[k];
    }
    CHECK(t.total == doctest::Approx(sum));
    CHECK_THROWS_AS(weight_table(ctx, 31), InvalidArgument);
}

TEST_CASE("sample_from_table frequencies") {
    WeightTable t;
    t.q = 101;
    t.n_lo = -3;
    t.values = {0, 1, 2, 0, 3.5, 0.5, 0};
    t.total = 7;
    std::vector<int> hits(t.values.size(), 0);
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) ++hits[static_cast<size_t>(sample_from_table(t, static_cast<uint64_t>(s)) - t.n_lo)];
    for (size_t k = 0; k < t.values.size(); ++k) {
        const double p = t.values[k] / t.total;
        if (p == 0) {
            CHECK(hits[k] == 0);
            continue;
        }
        const double se = std::sqrt(p * (1 - p) / trials);
        CAPTURE(k);
        CHECK(std::abs(hits[k] / static_cast<double>(trials) - p) < 3 * se);
    }
    WeightTable point;
    point.q = 7;
    point.n_lo = 10;
    point.values = {0, 0, 4, 0};
    point.total = 4;
    for (uint64_t s = 0; s < 50; ++s) CHECK(sample_from_table(point, s) == 12);
    WeightTable empty;
    empty.values = {0, 0};
    CHECK_THROWS_AS(sample_from_table(empty, 1), DomainError);
}

TEST_CASE("stage2 selection") {
    auto sys = SievingSystem::eratosthenes();
    ConstructionOptions o;
    o.delta = 0.2;
    o.force_z = 300;
    o.force_scales = {3};
    auto P = derive_params(sys, 2000, o);
    REQUIRE(P.scales.size() == 1);
    REQUIRE(!P.scales[0].primes.empty());
    auto b = stage1_uniform(sys, P.z_used, 4);
    auto r1 = stage2_select(sys, P, b, 4, Stage2Mode::Sample);
    auto r2 = stage2_select(sys, P, b, 4, Stage2Mode::Sample);
    CHECK(r1.chosen == r2.chosen);
    CHECK(r1.chosen.size() + r1.rejected.size() == P.scales[0].primes.size());
    const auto& g = P.scales[0];
    for (const auto& [q, n] : r1.chosen) {
        CHECK(n > -static_cast<int64_t>(P.K * P.y));
        CHECK(n <= static_cast<int64_t>(P.y));
        CHECK(weight_lambda(sys, b, g.H, g.hm, q, n, P.K, P.z_used) > 0);
    }
    auto rc = stage2_select(sys, P, b, 4, Stage2Mode::Cover);
    REQUIRE(rc.cover);
    CHECK(rc.chosen.size() == r1.chosen.size());
    for (const auto& [q, n] : rc.chosen) CHECK(weight_lambda(sys, b, g.H, g.hm, q, n, P.K, P.z_used) > 0);
    auto rc2 = stage2_select(sys, P, b, 4, Stage2Mode::Cover);
    CHECK(rc.chosen == rc2.chosen);

    auto none = P;
    none.scales.clear();
    auto e = stage2_select(sys, none, b, 4, Stage2Mode::Sample);
    CHECK(e.chosen.empty());
    CHECK(!e.warnings.empty());
}

TEST_CASE("killing residue and greedy") {
    auto sys = SievingSystem::twin();
    for (int64_t n = -30; n < 30; ++n) {
        const uint64_t b = killing_residue(sys, 13, n);
        ShiftVector s(13);
        s.set(13, b);
        CHECK(!is_member(sys, s, n, 12, 13));
    }
    auto era = SievingSystem::eratosthenes();
    ShiftVector s = stage1_uniform(era, 10, 2);
    const auto before = sift(era, 10, s, 1, 300).count();
    auto picks = greedy_assign(era, s, {11, 13, 17}, 10, 300);
    REQUIRE(picks.size() == 3);
    s.set_cutoff(17);
    CHECK(sift(era, 17, s, 1, 300).count() < before);
    // the first pick removes at least the average share
    ShiftVector t = stage1_uniform(era, 10, 2);
    auto alive = sift(era, 10, t, 1, 300);
    uint64_t best = 0;
    for (uint64_t r = 0; r < 11; ++r) {
        uint64_t c = 0;
        for (int64_t n = 1; n <= 300; ++n) c += alive.member(n) && static_cast<uint64_t>(n % 11) == r;
        best = std::max(best, c);
    }
    uint64_t hit = 0;
    for (int64_t n = 1; n <= 300; ++n) hit += alive.member(n) && static_cast<uint64_t>(n % 11) == picks[0].second;
    CHECK(hit == best);
}

TEST_CASE("stage3 cleanup examples") {
    // only primes in (20, 40] sieve, I_q = {0}
    std::map<uint64_t, std::vector<uint64_t>> tab;
    for (uint64_t q : {23, 29, 31, 37}) tab[q] = {0};
    auto sys = SievingSystem::table(tab);
    ShiftVector partial(20);

    auto one = stage3_cleanup(sys, 40, partial, 1, 5);
    CHECK(one.success);
    CHECK(one.survivors == 1);
    CHECK(one.shift.get(23) == 1);
    CHECK(!is_member(sys, one.shift, 1, 1, 40));

    auto four = stage3_cleanup(sys, 40, partial, 4, 5);
    CHECK(four.success);
    CHECK(four.matched == 4);
    CHECK(verify_empty(sys, 40, four.shift, 1, 4));

    auto five = stage3_cleanup(sys, 40, partial, 5, 5);
    CHECK(!five.success);
    CHECK(five.survivors == 5);
    CHECK(five.available == 4);

    // T empty: everything gets a random residue
    tab[2] = {0};
    auto sys2 = SievingSystem::table(tab);
    ShiftVector p2(20);
    p2.set(2, 1);
    auto empty = stage3_cleanup(sys2, 40, p2, 1, 5);
    CHECK(empty.success);
    CHECK(empty.survivors == 0);
    CHECK(empty.matched == 0);
    for (uint64_t q : {23, 29, 31, 37}) CHECK(empty.shift.contains(q));
    CHECK(empty.shift.get(23) == Rng::substream(5, Stream::Stage3, 23).below(23));

    auto max = stage3_cleanup_maximal(sys, 40, partial, 5);
    CHECK(max.target == 4);
    CHECK(initial_empty_run(sys, 40, max.shift) == 4);
}

TEST_CASE("construct beats the baseline at x = 100") {
    auto sys = SievingSystem::eratosthenes();
    auto P = derive_params(sys, 100);
    int wins = 0;
    const int seeds = 20;
    for (int s = 1; s <= seeds; ++s) {
        auto r = construct(sys, P, static_cast<uint64_t>(s), Stage2Mode::Sample);
        auto b = trivial_baseline(sys, 100, static_cast<uint64_t>(s));
        CHECK(r.verified);
        CHECK(b.verified);
        CHECK(verify_empty(sys, 100, r.shift, 1, static_cast<int64_t>(r.L)));
        CHECK(is_member(sys, r.shift, static_cast<int64_t>(r.L) + 1, 1, 100));
        CHECK(r.survivors_stage2 <= r.survivors_stage1);
        CHECK(r.survivors_stage3 <= r.survivors_stage2);
        CHECK(b.L >= 25);
        wins += r.L >= b.L;
    }
    CHECK(wins >= seeds * 8 / 10);
}

TEST_CASE("construct with scales is deterministic across thread caps") {
    auto sys = SievingSystem::eratosthenes();
    ConstructionOptions o;
    o.delta = 0.2;
    o.force_z = 300;
    o.force_scales = {3, 3.3};
    auto P = derive_params(sys, 2000, o);
    auto a = construct(sys, P, 12, Stage2Mode::Sample);
    set_thread_cap(1);
    auto b = construct(sys, P, 12, Stage2Mode::Sample);
    auto c1 = construct(sys, P, 12, Stage2Mode::Cover);
    set_thread_cap(0);
    auto c2 = construct(sys, P, 12, Stage2Mode::Cover);
    CHECK(a.shift == b.shift);
    CHECK(a.L == b.L);
    CHECK(c1.shift == c2.shift);
    CHECK(a.verified);
    CHECK(c1.verified);
    CHECK(a.q_count > 0);
    CHECK(a.survivors_stage2 <= a.survivors_stage1);
}

TEST_CASE("degraded construct grows linearly in x") {
    auto sys = SievingSystem::eratosthenes();
    for (uint64_t x : {100, 200, 400, 800}) {
        auto P = derive_params(sys, x);
        REQUIRE(P.degraded);
        auto r = construct(sys, P, 3, Stage2Mode::Sample);
        CAPTURE(x);
        CHECK(static_cast<double>(r.L) >= 0.5 * static_cast<double>(x));
    }
}

TEST_CASE("baseline on a system with no classes") {
    std::map<uint64_t, std::vector<uint64_t>> tab;
    auto sys = SievingSystem::table(tab);
    auto b = trivial_baseline(sys, 100, 1);
    CHECK(b.reference_target == 0.0);
    CHECK(b.L == 0);
    CHECK(b.verified);
}
