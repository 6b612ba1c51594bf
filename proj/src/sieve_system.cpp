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

#include "sieve_system.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <shared_mutex>
#include <unordered_map>

#include "parallel.hpp"
#include "primes.hpp"

namespace sievegap {

namespace {

std::atomic<uint64_t> g_next_id{1};

constexpr uint64_t kBruteForceLimit = 100000;

}  // namespace

struct SievingSystem::Impl {
    SystemKind kind = SystemKind::Eratosthenes;
    std::string name;
    std::optional<Polynomial> poly;
    SmallPrimeRule rule = SmallPrimeRule::AllPrimes;
    std::map<uint64_t, std::vector<uint64_t>> table;
    bool normalized = false;
    uint64_t id = g_next_id.fetch_add(1);

    mutable std::shared_mutex mutex;
    mutable std::unordered_map<uint64_t, std::vector<uint64_t>> cache;

    std::vector<uint64_t> compute(uint64_t p) const {
        std::vector<uint64_t> r;
        switch (kind) {
            case SystemKind::Eratosthenes:
                r = {0};
                break;
            case SystemKind::Twin:
                r = p == 2 ? std::vector<uint64_t>{0} : std::vector<uint64_t>{0, p - 2};
                break;
            case SystemKind::Table: {
                auto it = table.find(p);
                if (it != table.end()) r = it->second;
                break;
            }
            case SystemKind::Polynomial: {
                const auto d = static_cast<uint64_t>(poly->degree());
                if (rule == SmallPrimeRule::EmptyUpToDegree && p <= d) break;
                r = (p <= kBruteForceLimit || p <= d) ? poly->roots_mod_bruteforce(p) : poly->roots_mod_fast(p);
                break;
            }
        }
        if (normalized && !r.empty()) {
            const uint64_t shift = r.front();
            for (auto& v : r) v = (v + p - shift) % p;
            std::sort(r.begin(), r.end());
        }
        return r;
    }
};

SievingSystem SievingSystem::eratosthenes() {
    auto impl = std::make_shared<Impl>();
    impl->kind = SystemKind::Eratosthenes;
    impl->name = "eratosthenes";
    return SievingSystem(impl);
}

SievingSystem SievingSystem::twin() {
    auto impl = std::make_shared<Impl>();
    impl->kind = SystemKind::Twin;
    impl->name = "twin";
    return SievingSystem(impl);
}

SievingSystem SievingSystem::polynomial(Polynomial f, SmallPrimeRule rule) {
    if (f.degree() < 1) throw InvalidArgument("polynomial system needs degree >= 1");
    auto impl = std::make_shared<Impl>();
    impl->kind = SystemKind::Polynomial;
    impl->name = std::string(rule == SmallPrimeRule::AllPrimes ? "poly:" : "poly-strict:") + f.to_string();
    impl->poly = std::move(f);
    impl->rule = rule;
    return SievingSystem(impl);
}

SievingSystem SievingSystem::table(const std::map<uint64_t, std::vector<uint64_t>>& entries) {
    auto impl = std::make_shared<Impl>();
    impl->kind = SystemKind::Table;
    impl->name = "table";
    for (const auto& [p, residues] : entries) {
        if (!is_prime_u64(p)) throw InvalidArgument("table key " + std::to_string(p) + " is not prime");
        std::vector<uint64_t> r = residues;
        for (uint64_t v : r) {
            if (v >= p) {
                throw InvalidArgument("residue " + std::to_string(v) + " out of range for p=" + std::to_string(p));
            }
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        impl->table[p] = std::move(r);
    }
    return SievingSystem(impl);
}

SievingSystem SievingSystem::builtin(std::string_view name) {
    if (name == "eratosthenes") return eratosthenes();
    if (name == "twin") return twin();
    if (name.rfind("poly-strict:", 0) == 0) {
        return polynomial(Polynomial::parse(name.substr(12)), SmallPrimeRule::EmptyUpToDegree);
    }
    if (name.rfind("poly:", 0) == 0) return polynomial(Polynomial::parse(name.substr(5)));
    throw InvalidArgument("unknown built-in system '" + std::string(name) + "'");
}

SystemKind SievingSystem::kind() const { return impl_->kind; }
const std::string& SievingSystem::name() const { return impl_->name; }
int SievingSystem::degree() const { return impl_->poly ? impl_->poly->degree() : 0; }
const Polynomial* SievingSystem::polynomial_ptr() const { return impl_->poly ? &*impl_->poly : nullptr; }
SmallPrimeRule SievingSystem::small_prime_rule() const { return impl_->rule; }
bool SievingSystem::normalized() const { return impl_->normalized; }
uint64_t SievingSystem::id() const { return impl_->id; }

std::span<const uint64_t> SievingSystem::residues(uint64_t p) const {
    {
        std::shared_lock lock(impl_->mutex);
        auto it = impl_->cache.find(p);
        if (it != impl_->cache.end()) return it->second;
    }
    if (!is_prime_u64(p)) throw DomainError("residues: " + std::to_string(p) + " is not prime");
    auto computed = impl_->compute(p);
    std::unique_lock lock(impl_->mutex);
    // unordered_map nodes are stable, so the returned span survives later inserts
    auto [it, inserted] = impl_->cache.try_emplace(p, std::move(computed));
    return it->second;
}

std::optional<uint64_t> SievingSystem::first_degenerate(uint64_t lo, uint64_t hi) const {
    materialize(lo, hi);
    for (uint64_t p : primes_in(lo, hi)) {
        if (degenerate_at(p)) return p;
    }
    return std::nullopt;
}

void SievingSystem::require_nondegenerate(uint64_t lo, uint64_t hi, std::string_view context) const {
    if (auto p = first_degenerate(lo, hi)) {
        throw DomainError(std::string(context) + ": system is degenerate at p=" + std::to_string(*p) +
                          " (|I_p| = p)");
    }
}

void SievingSystem::materialize(uint64_t lo, uint64_t hi) const {
    const auto ps = primes_in(lo, hi);
    parallel_for(ps.size(), [&](size_t i) { (void)residues(ps[i]); });
}

size_t SievingSystem::max_class_count(uint64_t x) const {
    size_t best = 0;
    for (uint64_t p : primes_up_to(x)) best = std::max(best, class_count(p));
    return best;
}

SievingSystem SievingSystem::normalize_shift() const {
    auto impl = std::make_shared<Impl>();
    impl->kind = impl_->kind;
    impl->name = impl_->name + "+normalized";
    impl->poly = impl_->poly;
    impl->rule = impl_->rule;
    impl->table = impl_->table;
    impl->normalized = true;
    return SievingSystem(impl);
}

ExtendedReal sigma(const SievingSystem& sys, uint64_t z, uint64_t x) {
    if (z < 1 || z > x) throw InvalidArgument("sigma: need 1 <= z <= x");
    sys.materialize(z, x);
    ExtendedReal out;
    size_t ops = 0;
    for (uint64_t p : primes_in(z, x)) {
        const size_t k = sys.class_count(p);
        if (k == 0) continue;
        if (k == p) {
            throw DomainError("sigma: system is degenerate at p=" + std::to_string(p));
        }
        out.value *= static_cast<__float128>(p - k) / static_cast<__float128>(p);
        ops += 2;
    }
    // each correctly rounded op contributes at most 2^-113 relative error
    out.rel_error_bound = static_cast<double>(ops) * 0x1.0p-113;
    return out;
}

mpq_class sigma_exact(const SievingSystem& sys, uint64_t z, uint64_t x) {
    if (z < 1 || z > x) throw InvalidArgument("sigma_exact: need 1 <= z <= x");
    sys.materialize(z, x);
    mpz_class num = 1, den = 1;
    for (uint64_t p : primes_in(z, x)) {
        const size_t k = sys.class_count(p);
        if (k == 0) continue;
        if (k == p) throw DomainError("sigma: system is degenerate at p=" + std::to_string(p));
        num *= static_cast<unsigned long>(p - k);
        den *= static_cast<unsigned long>(p);
    }
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

mpz_class period(const SievingSystem& sys, uint64_t z, uint64_t x) {
    mpz_class out = 1;
    if (x <= z) return out;
    for (uint64_t p : primes_in(z, x)) {
        if (sys.class_count(p) > 0) out *= static_cast<unsigned long>(p);
    }
    return out;
}

double estimate_rho(const SievingSystem& sys, uint64_t x) {
    if (x < 10) throw InvalidArgument("estimate_rho: need x >= 10");
    sys.materialize(x);
    uint64_t count = 0;
    for (uint64_t p : primes_up_to(x)) {
        if (sys.class_count(p) > 0) ++count;
    }
    const double xd = static_cast<double>(x);
    return static_cast<double>(count) / (xd / std::log(xd));
}

double supported_share(const SievingSystem& sys, uint64_t x) {
    if (x < 2) throw InvalidArgument("supported_share: need x >= 2");
    sys.materialize(x);
    const auto ps = primes_up_to(x);
    const auto count = std::count_if(ps.begin(), ps.end(), [&](uint64_t p) { return sys.class_count(p) > 0; });
    return static_cast<double>(count) / static_cast<double>(ps.size());
}

DensityReport mertens_fit(const SievingSystem& sys, const std::vector<uint64_t>& checkpoints, double drift_ratio) {
    if (checkpoints.empty()) throw InvalidArgument("mertens_fit: no checkpoints");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 100) throw InvalidArgument("mertens_fit: checkpoints must be >= 100");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw InvalidArgument("mertens_fit: checkpoints must be strictly increasing");
        }
    }
    DensityReport rep;
    rep.drift_ratio = drift_ratio;
    const uint64_t x = checkpoints.back();
    rep.x = x;
    sys.materialize(x);
    rep.degenerate_prime = sys.first_degenerate(0, x);
    if (rep.degenerate_prime) {
        rep.warnings.push_back("degenerate at p=" + std::to_string(*rep.degenerate_prime) +
                               "; sifted set is empty");
        rep.one_dimensional = false;
        rep.sigma = 0;
        rep.rho_hat = estimate_rho(sys, std::max<uint64_t>(x, 10));
        rep.rho_share = supported_share(sys, std::max<uint64_t>(x, 2));
        rep.bound_B = sys.max_class_count(x);
        rep.period_bitlength = mpz_sizeinbase(period(sys, x).get_mpz_t(), 2);
        return rep;
    }
    // cumulative product across checkpoints
    ExtendedReal running;
    uint64_t prev = 1;
    for (uint64_t c : checkpoints) {
        const ExtendedReal part = sigma(sys, prev, c);
        running.value *= part.value;
        running.rel_error_bound += part.rel_error_bound + 0x1.0p-113;
        rep.mertens_track.emplace_back(c, running.to_double() * std::log(static_cast<double>(c)));
        prev = c;
    }
    rep.sigma = running.to_double();
    rep.sigma_rel_error = running.rel_error_bound;
    rep.period_bitlength = mpz_sizeinbase(period(sys, x).get_mpz_t(), 2);
    rep.rho_hat = estimate_rho(sys, x);
    rep.rho_share = supported_share(sys, x);
    rep.bound_B = sys.max_class_count(x);

    const auto& t = rep.mertens_track;
    if (t.size() >= 2) {
        bool increasing = true, decreasing = true;
        for (size_t i = 1; i < t.size(); ++i) {
            if (t[i].second <= t[i - 1].second) increasing = false;
            if (t[i].second >= t[i - 1].second) decreasing = false;
        }
        const double last = t.back().second, before = t[t.size() - 2].second;
        const double drift = before != 0 ? std::abs(last / before - 1.0) : 0.0;
        if ((increasing || decreasing) && drift > drift_ratio) {
            rep.one_dimensional = false;
            rep.warnings.push_back("sigma(x) log x drifts by " + std::to_string(drift) +
                                   " between the last two checkpoints; not one-dimensional");
        }
    }
    if (sys.kind() == SystemKind::Twin) {
        rep.one_dimensional = false;
        rep.warnings.push_back("twin system is two-dimensional");
    }
    return rep;
}

DensityReport system_info(const SievingSystem& sys, uint64_t x, double drift_ratio) {
    if (x < 100) throw InvalidArgument("system-info: need x >= 100");
    std::vector<uint64_t> ladder;
    for (uint64_t c : {x / 100, x / 10, x}) {
        if (c >= 100 && (ladder.empty() || c > ladder.back())) ladder.push_back(c);
    }
    return mertens_fit(sys, ladder, drift_ratio);
}

}  // namespace sievegap
