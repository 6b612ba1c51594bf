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

#include <cstdio>
#include <filesystem>
#include <map>

#include "parallel.hpp"
#include "primes.hpp"
#include "rng.hpp"
#include "sifted_window.hpp"

using namespace sievegap;

namespace {

bool oracle_member(const std::map<uint64_t, std::vector<uint64_t>>& table, const ShiftVector& b, uint64_t z,
                   uint64_t x, int64_t n) {
    for (const auto& [p, res] : table) {
        if (p <= z || p > x) continue;
        const auto pi = static_cast<int64_t>(p);
        const int64_t r = (((n - static_cast<int64_t>(b.get(p))) % pi) + pi) % pi;
        for (uint64_t v : res)
            if (static_cast<int64_t>(v) == r) return false;
    }
    return true;
}

GapResult oracle_gap(const std::vector<int64_t>& members, int64_t lo, int64_t hi) {
    GapResult g;
    g.members = members.size();
    for (size_t i = 1; i < members.size(); ++i) {
        const auto d = static_cast<uint64_t>(members[i] - members[i - 1]);
        if (d > g.length) {
            g.length = d;
            g.left = members[i - 1];
        }
    }
    if (members.size() < 2) {
        g.sentinel = true;
        g.length = static_cast<uint64_t>(hi - lo + 1);
        g.left = lo;
    }
    return g;
}

}  // namespace

TEST_CASE("sift: Eratosthenes examples") {
    auto era = SievingSystem::eratosthenes();
    auto w = sift(era, 5, ShiftVector(5), 1, 30);
    CHECK(w.members() == std::vector<int64_t>{1, 7, 11, 13, 17, 19, 23, 29});

    auto g = largest_gap(sift(era, 5, ShiftVector(5), 1, 31));
    CHECK(g.length == 6);
    CHECK(g.left == 1);
    CHECK_FALSE(g.sentinel);

    auto g3 = largest_gap(sift(era, 3, ShiftVector(3), 1, 13));
    CHECK(g3.length == 4);
    CHECK(g3.left == 1);  // 1 -> 5 ties 7 -> 11; leftmost wins

    auto all = largest_gap(sift(SievingSystem::table({}), 100, ShiftVector(), 10, 20));
    CHECK(all.length == 1);

    auto one = largest_gap(sift(era, 5, ShiftVector(5), 2, 6));
    CHECK(one.sentinel);
    CHECK(one.length == 5);
}

TEST_CASE("sift: periodicity and exact count over a full period") {
    auto era = SievingSystem::eratosthenes();
    auto f = SievingSystem::builtin("poly:n^2+1");
    for (const auto& [sys, x] : {std::pair{era, uint64_t{13}}, std::pair{f, uint64_t{30}}}) {
        const mpz_class P = period(sys, x);
        REQUIRE(P <= 1000000);
        const int64_t Pi = P.get_si();
        auto w = sift(sys, x, ShiftVector(x), 1, 2 * Pi);
        for (int64_t n = 1; n <= Pi; ++n) CHECK(w.member(n) == w.member(n + Pi));
        const mpq_class expect = sigma_exact(sys, 1, x) * P;
        CHECK(expect.get_den() == 1);
        CHECK(mpz_class(w.count() / 2) == expect.get_num());
    }
}

TEST_CASE("sift: degenerate and bad arguments") {
    auto deg = SievingSystem::table({{2, {0, 1}}});
    CHECK_THROWS_AS(sift(deg, 2, ShiftVector(), 1, 10), DomainError);
    CHECK_THROWS_AS(sift(SievingSystem::eratosthenes(), 5, ShiftVector(), 1, 10, 6), InvalidArgument);
    CHECK_THROWS_AS(sift(SievingSystem::eratosthenes(), 5, ShiftVector(), 0, int64_t{1} << 32), InvalidArgument);
}

TEST_CASE("verify_empty") {
    auto era = SievingSystem::eratosthenes();
    ShiftVector b1(5);
    for (uint64_t p : {2, 3, 5}) b1.set(p, 1);
    // n - 1 for n in 2..6 is 1..5; 1 survives, so b=1 does not empty [2,6]
    CHECK(verify_empty(era, 5, b1, 2, 6) == (sift(era, 5, b1, 2, 6).count() == 0));
    CHECK(verify_empty(era, 5, ShiftVector(5), 2, 6));
    CHECK(verify_empty(era, 5, b1, 10, 3));
    CHECK_FALSE(verify_empty(era, 5, ShiftVector(5), 1, 1));
}

TEST_CASE("sift matches per-integer brute force on 50 random small systems") {
    const auto ps = primes_up_to(50);
    for (uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng = Rng::substream(kDefaultSeed, Stream::Fixture, 100 + trial);
        std::map<uint64_t, std::vector<uint64_t>> table;
        for (uint64_t p : ps) {
            const uint64_t k = rng.below(std::min<uint64_t>(4, p));
            std::vector<uint64_t> res;
            while (res.size() < k) {
                const uint64_t r = rng.below(p);
                if (std::find(res.begin(), res.end(), r) == res.end()) res.push_back(r);
            }
            table[p] = res;
        }
        auto sys = SievingSystem::table(table);
        ShiftVector b(50);
        for (uint64_t p : ps) b.set(p, rng.below(p));
        const int64_t lo = static_cast<int64_t>(rng.below(20000)) - 10000;
        const int64_t hi = lo + 9999;
        const uint64_t z = trial % 5 == 0 ? 7 : 1;
        auto w = sift(sys, 50, b, lo, hi, z);
        std::vector<int64_t> expect;
        for (int64_t n = lo; n <= hi; ++n) {
            const bool m = oracle_member(table, b, z, 50, n);
            CHECK(w.member(n) == m);
            if (m) expect.push_back(n);
        }
        CHECK(w.members() == expect);
        auto g = largest_gap(w);
        auto og = oracle_gap(expect, lo, hi);
        CHECK(g.length == og.length);
        CHECK(g.left == og.left);
        CHECK(g.sentinel == og.sentinel);
        // chunk boundaries must not split or hide a gap
        for (uint64_t chunk : {1ull, 7ull, 64ull, 1000ull}) {
            auto gc = largest_gap_chunked(sys, 50, b, lo, hi, z, chunk);
            CHECK(gc.length == og.length);
            CHECK(gc.left == og.left);
            CHECK(gc.members == og.members);
        }
    }
}

TEST_CASE("sieving is monotone in x") {
    auto f = SievingSystem::builtin("poly:n^2+1");
    Rng rng(7);
    ShiftVector b(200);
    for (uint64_t p : primes_up_to(200)) b.set(p, rng.below(p));
    auto small = sift(f, 50, b, -500, 5000);
    auto large = sift(f, 200, b, -500, 5000);
    for (int64_t n = -500; n <= 5000; ++n) {
        if (large.member(n)) CHECK(small.member(n));
    }
}

TEST_CASE("sift is independent of the thread cap") {
    auto f = SievingSystem::builtin("poly:n^2+1");
    Rng rng(9);
    ShiftVector b(3000);
    for (uint64_t p : primes_up_to(3000)) b.set(p, rng.below(p));
    set_thread_cap(1);
    auto a = sift(f, 3000, b, -100000, 1000000);
    set_thread_cap(8);
    auto c = sift(f, 3000, b, -100000, 1000000);
    set_thread_cap(0);
    CHECK(a.words() == c.words());
}

TEST_CASE("shift vectors: CRT round trip and files") {
    auto era = SievingSystem::eratosthenes();
    const mpz_class b("123456789012345678901234567890");
    auto sv = ShiftVector::from_integer(era, 100, b);
    CHECK(sv.size() == 25);
    const mpz_class P = period(era, 100);
    CHECK(sv.to_integer() == mpz_class(b % P));

    const auto path = (std::filesystem::temp_directory_path() / "sievegap_shift_test.txt").string();
    write_shift_file(path, sv);
    auto back = read_shift_file(path);
    CHECK(back.entries() == sv.entries());
    std::remove(path.c_str());

    ShiftVector s;
    s.set(7, 10);
    s.set(3, 2);
    CHECK(s.get(7) == 3);
    CHECK(s.get(5) == 0);
    CHECK(s.entries().front().first == 3);
}
