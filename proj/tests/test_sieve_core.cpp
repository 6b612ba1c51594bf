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
#include <fstream>
#include <set>

#include <json.hpp>

#include "parallel.hpp"
#include "primes.hpp"
#include "rng.hpp"
#include "sieve_system.hpp"

using namespace sievegap;

namespace {

// direct evaluation in the standard basis, independent of the binomial-basis code
std::vector<uint64_t> oracle_roots(const std::vector<long>& coeffs, uint64_t p) {
    std::vector<uint64_t> out;
    for (uint64_t n = 0; n < p; ++n) {
        mpz_class v = 0, pw = 1;
        for (long c : coeffs) {
            v += pw * c;
            pw *= static_cast<unsigned long>(n);
        }
        if (mpz_divisible_ui_p(v.get_mpz_t(), p)) out.push_back(n);
    }
    return out;
}

std::vector<uint64_t> to_vec(std::span<const uint64_t> s) { return {s.begin(), s.end()}; }

bool trial_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("prime table and primality") {
    const auto ps = primes_up_to(1000);
    CHECK(ps.size() == 168);
    for (uint64_t n = 0; n < 5000; ++n) CHECK(is_prime_u64(n) == trial_prime(n));
    CHECK(is_prime_u64(18446744073709551557ull));
    CHECK_FALSE(is_prime_u64(3215031751ull));  // strong pseudoprime to bases 2,3,5,7
    CHECK(prime_count(10000) == 1229);
    CHECK(primes_in(10, 20) == std::vector<uint64_t>{11, 13, 17, 19});

    const mpz_class big("170141183460469231731687303715884105727");  // 2^127 - 1
    auto v = check_prime(big);
    CHECK(v.prime);
    CHECK(v.probabilistic);
    CHECK_FALSE(check_prime(big * 3).prime);
}

TEST_CASE("polynomial parsing and integer-valued forms") {
    auto f = Polynomial::parse("n^2+1");
    CHECK(f.degree() == 2);
    CHECK(f.binomial_coeffs() == std::vector<mpz_class>{1, 1, 2});
    CHECK(f.eval(10) == 101);

    auto g = Polynomial::parse("(n^7 - n + 7)/7");
    CHECK(g.degree() == 7);
    for (long n = -20; n <= 20; ++n) {
        mpz_class expect = (mpz_class(n) * n * n * n * n * n * n - n + 7) / 7;
        CHECK(g.eval(n) == expect);
    }
    CHECK(Polynomial::parse("1/2 n^2 + 1/2 n").eval(4) == 10);
    CHECK_THROWS_AS(Polynomial::parse("n/2"), InvalidArgument);
    CHECK_THROWS_AS(Polynomial::parse("n^2 +"), InvalidArgument);
    CHECK(Polynomial::parse("binom:1,1,2").eval(3) == 10);
    CHECK(Polynomial::parse("3x^3 - 2x + 7").eval(2) == 27);
}

TEST_CASE("residues: spec examples") {
    auto era = SievingSystem::eratosthenes();
    CHECK(to_vec(era.residues(7)) == std::vector<uint64_t>{0});

    auto f = SievingSystem::builtin("poly:n^2+1");
    CHECK(f.residues(3).empty());
    CHECK(to_vec(f.residues(5)) == std::vector<uint64_t>{2, 3});
    CHECK(to_vec(f.residues(2)) == std::vector<uint64_t>{1});

    auto strict = SievingSystem::builtin("poly-strict:n^2+1");
    CHECK(strict.residues(2).empty());
    CHECK(to_vec(strict.residues(5)) == std::vector<uint64_t>{2, 3});

    CHECK_THROWS_AS(era.residues(9), DomainError);
    CHECK_THROWS_AS(f.residues(1), DomainError);
}

TEST_CASE("residues agree with standard-basis evaluation on 100 random (f, p)") {
    Rng rng(derive_seed(kDefaultSeed, Stream::Fixture, 11));
    const auto ps = primes_up_to(997);
    for (int trial = 0; trial < 100; ++trial) {
        const int deg = 1 + static_cast<int>(rng.below(4));
        std::vector<long> c(deg + 1);
        for (auto& v : c) v = static_cast<long>(rng.below(41)) - 20;
        if (c.back() == 0) c.back() = 1;
        std::vector<mpq_class> q(c.begin(), c.end());
        auto poly = Polynomial::from_standard(q);
        auto sys = SievingSystem::polynomial(poly);
        const uint64_t p = ps[rng.below(ps.size())];
        const auto expect = oracle_roots(c, p);
        CHECK(to_vec(sys.residues(p)) == expect);
        CHECK(poly.roots_mod_bruteforce(p) == expect);
        if (p > static_cast<uint64_t>(deg)) {
            CHECK(poly.roots_mod_fast(p) == expect);
            CHECK(expect.size() <= static_cast<size_t>(deg));
        }
    }
}

TEST_CASE("fast root path matches brute force above the brute-force limit") {
    const auto poly = Polynomial::parse("n^4 + 3n^2 - 7n + 11");
    for (uint64_t p : primes_in(100000, 100400)) {
        CHECK(poly.roots_mod_fast(p) == poly.roots_mod_bruteforce(p));
    }
    // splits completely
    const auto split = Polynomial::parse("(n-1)(n-2)(n-3)(n-5)");
    CHECK(split.roots_mod_fast(1000003) == std::vector<uint64_t>{1, 2, 3, 5});
}

TEST_CASE("polynomial systems are B-bounded by the degree") {
    auto sys = SievingSystem::builtin("poly:n^3 - 2");
    sys.materialize(20000);
    for (uint64_t p : primes_in(3, 20000)) CHECK(sys.class_count(p) <= 3);
}

TEST_CASE("normalize_shift") {
    auto sys = SievingSystem::table({{5, {2, 3}}, {7, {}}, {3, {0, 2}}});
    auto n = sys.normalize_shift();
    CHECK(n.normalized());
    CHECK(to_vec(n.residues(5)) == std::vector<uint64_t>{0, 1});
    CHECK(n.residues(7).empty());
    CHECK(to_vec(n.residues(3)) == std::vector<uint64_t>{0, 2});

    auto f = SievingSystem::builtin("poly:n^2+1");
    auto fn = f.normalize_shift();
    for (uint64_t p : primes_up_to(3000)) {
        CHECK(fn.class_count(p) == f.class_count(p));
        if (fn.class_count(p) > 0) CHECK(fn.residues(p)[0] == 0);
    }
    CHECK(sigma_exact(fn, 1, 3000) == sigma_exact(f, 1, 3000));
}

TEST_CASE("sigma and period") {
    auto era = SievingSystem::eratosthenes();
    CHECK(sigma_exact(era, 1, 10) == mpq_class(8, 35));
    CHECK(std::abs(sigma(era, 1, 10).to_double() - 8.0 / 35.0) < 1e-15);
    CHECK(sigma(era, 50, 50).to_double() == 1.0);

    auto f = SievingSystem::builtin("poly:n^2+1");
    CHECK(sigma_exact(f, 1, 5) == mpq_class(3, 10));

    CHECK(period(era, 10) == 210);
    CHECK(period(f, 4) == 2);
    CHECK(period(SievingSystem::table({}), 100) == 1);

    for (uint64_t x : {10u, 30u, 97u, 500u}) {
        for (uint64_t xp : {x, x + 1, 2 * x}) {
            CHECK(mpz_divisible_p(period(f, xp).get_mpz_t(), period(f, x).get_mpz_t()));
        }
    }

    // sigma(z,x) sigma(x,w) = sigma(z,w)
    for (auto [z, x, w] : {std::tuple{1, 100, 10000}, {7, 7, 500}, {30, 1000, 100000}}) {
        const __float128 lhs = sigma(f, z, x).value * sigma(f, x, w).value;
        const __float128 rhs = sigma(f, z, w).value;
        const double rel = static_cast<double>((lhs - rhs) / rhs);
        CHECK(std::abs(rel) < 1e-30);
    }
}

TEST_CASE("degenerate systems") {
    auto deg = SievingSystem::table({{2, {0, 1}}});
    CHECK(deg.degenerate_at(2));
    CHECK(deg.first_degenerate(0, 100) == std::optional<uint64_t>(2));
    CHECK_THROWS_WITH_AS(sigma(deg, 1, 10), "sigma: system is degenerate at p=2", DomainError);

    auto even = SievingSystem::builtin("poly:n^2+n");
    CHECK(even.degenerate_at(2));
    CHECK_THROWS_AS(sigma_exact(even, 1, 10), DomainError);

    CHECK_THROWS_AS(SievingSystem::table({{4, {0}}}), InvalidArgument);
    CHECK_THROWS_AS(SievingSystem::table({{5, {5}}}), InvalidArgument);
}

TEST_CASE("estimate_rho") {
    auto era = SievingSystem::eratosthenes();
    CHECK(estimate_rho(era, 10000) == doctest::Approx(1229 * std::log(1e4) / 1e4).epsilon(1e-12));
    CHECK(estimate_rho(SievingSystem::table({}), 1000) == 0.0);
    // n^2+1: p = 2 and p = 1 mod 4 carry classes; 1 + 4783 of the 9592 primes below 1e5
    auto f = SievingSystem::builtin("poly:n^2+1");
    CHECK(estimate_rho(f, 100000) == doctest::Approx(4784 * std::log(1e5) / 1e5).epsilon(1e-12));
    CHECK(supported_share(f, 100000) == doctest::Approx(4784.0 / 9592).epsilon(1e-12));
    CHECK(supported_share(era, 10000) == 1.0);
}

#ifndef SIEVEGAP_FIXTURE_DIR
#define SIEVEGAP_FIXTURE_DIR "tests/fixtures"
#endif

TEST_CASE("sigma matches the high-precision fixture") {
    std::ifstream in(std::string(SIEVEGAP_FIXTURE_DIR) + "/mertens.json");
    REQUIRE(in.good());
    const auto fx = nlohmann::json::parse(in);
    for (const auto& [name, track] : fx.items()) {
        auto sys = SievingSystem::builtin(name);
        for (const auto& row : track) {
            const auto x = row["x"].get<uint64_t>();
            const long double want = std::stold(row["sigma"].get<std::string>());
            const auto got = sigma(sys, 1, x);
            CAPTURE(name);
            CAPTURE(x);
            CHECK(std::abs(static_cast<long double>(got.value) / want - 1) <= 1e-15L);
        }
    }
}

TEST_CASE("mertens_fit") {
    auto era = SievingSystem::eratosthenes();
    auto rep = mertens_fit(era, {10000, 100000, 1000000});
    REQUIRE(rep.mertens_track.size() == 3);
    // independent double-precision product oracle
    for (auto [x, t] : rep.mertens_track) {
        double prod = 1;
        for (uint64_t p : primes_up_to(x)) prod *= 1.0 - 1.0 / static_cast<double>(p);
        CHECK(t == doctest::Approx(prod * std::log(static_cast<double>(x))).epsilon(1e-9));
        CHECK(t == doctest::Approx(0.5615).epsilon(0.05));
    }
    CHECK(rep.one_dimensional);

    auto single = SievingSystem::table({{2, {0}}});
    auto srep = mertens_fit(single, {100, 10000, 1000000});
    CHECK(srep.mertens_track[0].second == doctest::Approx(0.5 * std::log(100.0)));
    CHECK_FALSE(srep.one_dimensional);

    auto f = SievingSystem::builtin("poly:n^2+1");
    auto frep = mertens_fit(f, {10000, 100000});
    const double last = frep.mertens_track.back().second;
    for (auto [x, t] : frep.mertens_track) CHECK(std::abs(t / last - 1) < 0.1);
    CHECK(frep.one_dimensional);

    auto twin = mertens_fit(SievingSystem::twin(), {1000, 10000, 100000});
    CHECK_FALSE(twin.one_dimensional);

    CHECK_THROWS_AS(mertens_fit(era, {50, 1000}), InvalidArgument);
}

TEST_CASE("residue cache is consistent under concurrent materialization") {
    set_thread_cap(8);
    auto a = SievingSystem::builtin("poly:n^4+n+1");
    auto b = SievingSystem::builtin("poly:n^4+n+1");
    a.materialize(50000);
    set_thread_cap(1);
    b.materialize(50000);
    set_thread_cap(0);
    for (uint64_t p : primes_up_to(50000)) CHECK(to_vec(a.residues(p)) == to_vec(b.residues(p)));
}
