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

#include "moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "construction.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "rng.hpp"
#include "sifted_window.hpp"

namespace sievegap {

namespace {

uint64_t mod_of(int64_t a, uint64_t p) {
    const auto m = static_cast<int64_t>(p);
    int64_t r = a % m;
    if (r < 0) r += m;
    return static_cast<uint64_t>(r);
}

bool in_difference_set(const SievingSystem& sys, uint64_t p, uint64_t r) {
    const auto res = sys.residues(p);
    for (uint64_t a : res)
        for (uint64_t b : res)
            if ((a + p - b) % p == r) return true;
    return false;
}

uint64_t shifted_size(const SievingSystem& sys, const std::vector<int64_t>& U, uint64_t p) {
    const auto res = sys.residues(p);
    if (res.empty() || U.empty()) return 0;
    std::vector<char> hit(p, 0);
    uint64_t n = 0;
    for (int64_t u : U) {
        const uint64_t um = mod_of(u, p);
        for (uint64_t r : res) {
            const uint64_t v = (um + p - r) % p;
            if (!hit[v]) {
                hit[v] = 1;
                ++n;
            }
        }
    }
    return n;
}

struct Summary {
    double mean = 0;
    double se = 0;
};

Summary summarize(const std::vector<double>& v) {
    Summary s;
    const auto n = static_cast<double>(v.size());
    s.mean = pairwise_sum(v.data(), v.size()) / n;
    if (v.size() < 2) return s;
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - s.mean) * (v[i] - s.mean);
    const double var = pairwise_sum(dev.data(), dev.size()) / (n - 1);
    s.se = std::sqrt(var / n);
    return s;
}

void finish(MomentReport& r) {
    if (r.std_error > 0) {
        r.z_score = (r.estimated - r.predicted) / r.std_error;
    } else {
        r.z_score = r.estimated == r.predicted ? 0.0 : std::numeric_limits<double>::infinity();
    }
    r.relative_deviation = r.predicted != 0 ? (r.estimated - r.predicted) / r.predicted : r.estimated;
    if (!r.exact && r.trials < 30) r.warnings.push_back("fewer than 30 trials; the normal approximation is rough");
}

uint64_t small_period(const SievingSystem& sys, uint64_t z) {
    const mpz_class P = period(sys, z);
    if (P > kExactPeriodLimit) {
        throw DomainError("exact mode needs P(z) <= " + std::to_string(kExactPeriodLimit) + ", got " + P.get_str());
    }
    return P.get_ui();
}

// shift for trial t: random, or the t-th residue b mod P(z) in exact mode
ShiftVector trial_shift(const SievingSystem& sys, uint64_t z, uint64_t seed, uint64_t t, bool exact) {
    if (exact) return ShiftVector::from_integer(sys, z, mpz_class(static_cast<unsigned long>(t)));
    return stage1_uniform(sys, z, derive_seed(seed, Stream::Trial, t));
}

MomentReport count_moment(const SievingSystem& sys, uint64_t z, uint64_t y, uint64_t trials, uint64_t seed, bool exact,
                          int power) {
    if (z < 1) throw InvalidArgument("moments: need z >= 1");
    sys.require_nondegenerate(0, z, "moments");
    MomentReport r;
    r.identity = power == 1 ? "i" : "i-second";
    r.exact = exact;
    if (exact) trials = small_period(sys, z);
    if (trials == 0) throw InvalidArgument("moments: trials = 0, no data");
    r.trials = trials;
    const mpq_class sig = sigma_exact(sys, 1, z);
    const mpq_class pred_q = power == 1 ? mpq_class(sig * y) : mpq_class(sig * y * sig * y);
    r.predicted = pred_q.get_d();
    r.exact_predicted = pred_q.get_str();
    if (y == 0) {
        r.estimated = 0;
        finish(r);
        return r;
    }
    sys.materialize(z);
    std::vector<uint64_t> counts(trials);
    parallel_for(trials, [&](size_t t) {
        const auto b = trial_shift(sys, z, seed, t, exact);
        counts[t] = sift(sys, z, b, 1, static_cast<int64_t>(y)).count();
    });
    std::vector<double> vals(trials);
    mpz_class total = 0;
    for (size_t t = 0; t < trials; ++t) {
        mpz_class c = static_cast<unsigned long>(counts[t]);
        if (power == 2) c *= c;
        total += c;
        vals[t] = c.get_d();
    }
    if (exact) {
        mpq_class mean(total, static_cast<unsigned long>(trials));
        mean.canonicalize();
        r.exact_mean = mean.get_str();
        r.estimated = mean.get_d();
        r.std_error = 0;
    } else {
        const auto s = summarize(vals);
        r.estimated = s.mean;
        r.std_error = s.se;
    }
    finish(r);
    return r;
}

}  // namespace

double error_E(const SievingSystem& sys, double A, int64_t m, uint64_t hm, uint64_t z) {
    if (!(A > 0)) throw InvalidArgument("error_E: need A > 0");
    // product of (1 + A/p) - 1 loses precision when small; accumulate log1p instead
    double log_prod = 0;
    for (uint64_t p : primes_in(hm, z)) {
        if (in_difference_set(sys, p, mod_of(m, p))) log_prod += std::log1p(A / static_cast<double>(p));
    }
    return std::expm1(log_prod);
}

mpq_class error_E_exact(const SievingSystem& sys, const mpq_class& A, int64_t m, uint64_t hm, uint64_t z) {
    if (sgn(A) <= 0) throw InvalidArgument("error_E: need A > 0");
    mpq_class prod = 1;
    for (uint64_t p : primes_in(hm, z)) {
        if (in_difference_set(sys, p, mod_of(m, p))) {
            mpq_class f = A / mpq_class(static_cast<unsigned long>(p));
            prod *= 1 + f;
        }
    }
    prod -= 1;
    prod.canonicalize();
    return prod;
}

uint64_t squarefree_count(uint64_t hm, uint64_t z) {
    const auto k = primes_in(hm, z).size();
    return k >= 63 ? std::numeric_limits<uint64_t>::max() : uint64_t{1} << k;
}

double correlation_exact(const SievingSystem& sys, const std::vector<int64_t>& U, uint64_t hm, uint64_t z) {
    double log_prod = 0;
    for (uint64_t p : primes_in(hm, z)) {
        const uint64_t n = shifted_size(sys, U, p);
        if (n == p) return 0.0;
        log_prod += std::log1p(-static_cast<double>(n) / static_cast<double>(p));
    }
    return std::exp(log_prod);
}

mpq_class correlation_exact_q(const SievingSystem& sys, const std::vector<int64_t>& U, uint64_t hm, uint64_t z) {
    mpq_class prod = 1;
    for (uint64_t p : primes_in(hm, z)) {
        const uint64_t n = shifted_size(sys, U, p);
        prod *= mpq_class(static_cast<unsigned long>(p - n), static_cast<unsigned long>(p));
    }
    prod.canonicalize();
    return prod;
}

MomentReport mc_first_moment(const SievingSystem& sys, uint64_t z, uint64_t y, uint64_t trials, uint64_t seed,
                             bool exact) {
    return count_moment(sys, z, y, trials, seed, exact, 1);
}

MomentReport mc_second_moment(const SievingSystem& sys, uint64_t z, uint64_t y, uint64_t trials, uint64_t seed,
                              bool exact) {
    return count_moment(sys, z, y, trials, seed, exact, 2);
}

MomentReport mc_lambda_moments(const SievingSystem& sys, const LambdaInstance& inst, LambdaIdentity which, int j,
                               uint64_t trials, uint64_t seed, bool exact) {
    if (j < 0 || j > 2) throw InvalidArgument("lambda moments: j must be 0, 1 or 2");
    if (inst.K < 2) throw InvalidArgument("lambda moments: need K >= 2");
    if (inst.hm > inst.z || inst.z < 1) throw InvalidArgument("lambda moments: need 1 <= hm <= z");
    if (inst.Q.empty()) throw InvalidArgument("lambda moments: Q is empty");
    const double entries = static_cast<double>(inst.Q.size()) * (inst.K + 1) * static_cast<double>(inst.y);
    if (entries > 1e8) throw InvalidArgument("lambda moments: |Q| (K+1) y exceeds 1e8 table entries; use a smaller y");
    for (uint64_t q : inst.Q) {
        if (q <= inst.z || !is_prime_u64(q)) throw InvalidArgument("lambda moments: every q must be a prime above z");
    }
    sys.require_nondegenerate(0, inst.z, "lambda moments");
    MomentReport r;
    r.identity = std::string(which == LambdaIdentity::II ? "ii" : "iii") + "-j" + std::to_string(j);
    r.exact = exact;
    if (exact) trials = small_period(sys, inst.z);
    if (trials == 0) throw InvalidArgument("moments: trials = 0, no data");
    r.trials = trials;

    const double Qn = static_cast<double>(inst.Q.size());
    const uint64_t J = static_cast<uint64_t>(std::floor(inst.K * inst.H + 1e-9));
    const double sigma2 = inst.hm < inst.z ? sigma(sys, inst.hm, inst.z).to_double() : 1.0;
    const double sig = sigma(sys, 1, inst.z).to_double();
    const double Y = static_cast<double>(inst.y);
    if (which == LambdaIdentity::II) {
        r.predicted = std::pow((inst.K + 1) * Y, j) * Qn;
    } else {
        r.predicted = std::pow(Qn * static_cast<double>(J) / sigma2, j) * sig * Y;
    }

    sys.materialize(inst.z);
    std::vector<double> vals(trials);
    parallel_for(trials, [&](size_t t) {
        const auto b = trial_shift(sys, inst.z, seed, t, exact);
        const auto ctx = make_scale_context(sys, b, inst.H, inst.hm, inst.K, inst.y, inst.z);
        std::vector<WeightTable> tables;
        tables.reserve(inst.Q.size());
        for (uint64_t q : inst.Q) tables.push_back(weight_table(ctx, q));
        double acc = 0;
        if (which == LambdaIdentity::II) {
            for (const auto& tb : tables) acc += std::pow(tb.total, j);
        } else {
            for (int64_t n = 1; n <= static_cast<int64_t>(inst.y); ++n) {
                if (!ctx.s1.member(n) || !ctx.s2.member(n)) continue;
                double inner = 0;
                for (const auto& tb : tables) {
                    for (uint64_t h = 1; h <= J; ++h) {
                        const int64_t idx = n - static_cast<int64_t>(tb.q * h) - tb.n_lo;
                        inner += tb.values[static_cast<size_t>(idx)];
                    }
                }
                acc += std::pow(inner, j);
            }
        }
        vals[t] = acc;
    });
    const auto s = summarize(vals);
    r.estimated = s.mean;
    r.std_error = exact ? 0.0 : s.se;
    finish(r);
    return r;
}

AveragedBoundCheck averaged_error_bound(const SievingSystem& sys, const std::vector<int64_t>& m, int64_t j, double A,
                                        double H, double M, uint64_t z, double X, double R, uint64_t y) {
    const double HM = std::pow(H, M);
    const auto hm = static_cast<uint64_t>(std::floor(HM));
    const double B = static_cast<double>(std::max<uint64_t>(sys.max_class_count(z), 1));
    if (A * B * B > HM) throw InvalidArgument("averaged bound: needs A B^2 <= H^M");
    if (y < 16) throw InvalidArgument("averaged bound: needs y >= 16");
    AveragedBoundCheck out;
    std::vector<double> terms(m.size());
    parallel_for(m.size(), [&](size_t t) { terms[t] = error_E(sys, A, m[t] + j, hm, z); });
    out.lhs = pairwise_sum(terms.data(), terms.size());
    out.rhs = 100.0 * (X * A / HM + R * std::exp(A * B * B * std::log(std::log(static_cast<double>(y)))));
    out.pass = out.lhs <= out.rhs;
    return out;
}

}  // namespace sievegap
