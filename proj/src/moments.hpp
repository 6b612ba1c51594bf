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
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sieve_system.hpp"

namespace sievegap {

// E_A(m;H) over squarefree d > 1 with prime factors in (hm, z]. The indicator
// factors over p | d, so the sum collapses to prod (1 + A/p) - 1 over primes with
// m mod p in I_p - I_p.
double error_E(const SievingSystem& sys, double A, int64_t m, uint64_t hm, uint64_t z);
mpq_class error_E_exact(const SievingSystem& sys, const mpq_class& A, int64_t m, uint64_t hm, uint64_t z);

// Number of squarefree d in D_H (including 1) = 2^{#primes in (hm, z]}, saturating.
uint64_t squarefree_count(uint64_t hm, uint64_t z);

// Pr(U in S_{hm,z} + b2) for uniform b2: prod over p in (hm, z] of 1 - |U mod p - I_p| / p.
double correlation_exact(const SievingSystem& sys, const std::vector<int64_t>& U, uint64_t hm, uint64_t z);
mpq_class correlation_exact_q(const SievingSystem& sys, const std::vector<int64_t>& U, uint64_t hm, uint64_t z);

struct MomentReport {
    std::string identity;
    double predicted = 0;
    double estimated = 0;
    double std_error = 0;
    uint64_t trials = 0;
    double z_score = 0;
    double relative_deviation = 0;
    // every shift mod P(z) was enumerated; estimated is then the exact mean
    bool exact = false;
    std::string exact_mean;       // rational, exact mode only
    std::string exact_predicted;  // rational, when the prediction is rational
    std::vector<std::string> warnings;
};

// Shifts mod P(z) are enumerated when P(z) is at most this.
constexpr uint64_t kExactPeriodLimit = 100000;

// |S cap [1,y]| with S = S_z + b, b uniform. exact=true enumerates every b mod P(z).
MomentReport mc_first_moment(const SievingSystem& sys, uint64_t z, uint64_t y, uint64_t trials, uint64_t seed,
                             bool exact = false);
MomentReport mc_second_moment(const SievingSystem& sys, uint64_t z, uint64_t y, uint64_t trials, uint64_t seed,
                              bool exact = false);

struct LambdaInstance {
    uint64_t y = 0;
    int K = 3;
    double H = 0;
    uint64_t hm = 0;  // floor(H^M), at most z
    uint64_t z = 0;
    std::vector<uint64_t> Q;
};

enum class LambdaIdentity { II, III };

// Left sides of the two lambda moment identities for j in {0, 1, 2}.
MomentReport mc_lambda_moments(const SievingSystem& sys, const LambdaInstance& inst, LambdaIdentity which, int j,
                               uint64_t trials, uint64_t seed, bool exact = false);

struct AveragedBoundCheck {
    double lhs = 0;
    double rhs = 0;  // 100 (X A / H^M + R exp(A B^2 log log y))
    bool pass = false;
};

// One-sided check of the averaged bound on sum_t E_A(m_t + j; H).
AveragedBoundCheck averaged_error_bound(const SievingSystem& sys, const std::vector<int64_t>& m, int64_t j, double A,
                                        double H, double M, uint64_t z, double X, double R, uint64_t y);

}  // namespace sievegap
