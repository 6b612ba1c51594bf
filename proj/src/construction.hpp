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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cover.hpp"
#include "sieve_system.hpp"
#include "sifted_window.hpp"

namespace sievegap {

enum class Stage2Mode { Sample, Cover };

struct ConstructionOptions {
    std::optional<double> delta;  // default min(0.9 C(rho_hat), 0.45)
    double M = 4.6;
    int K = 3;
    double xi = 1.1;
    std::optional<uint64_t> force_z;
    std::vector<double> force_scales;
    // window [1, greedy_window] scored by the plain greedy choice; default y
    std::optional<uint64_t> greedy_window;
    double cover_eta = 0.05;
};

struct ScaleGroup {
    double H = 0;
    uint64_t hm = 0;  // floor(H^M), capped at z
    std::vector<uint64_t> primes;  // Q_H
    uint64_t target_count = 0;
};

struct Params {
    uint64_t x = 0;
    double delta = 0;
    double M = 4.6;
    int K = 3;
    double xi = 1.1;
    uint64_t y = 0;
    uint64_t z = 0;       // the formula value y log log x / sqrt(log x)
    uint64_t z_used = 0;  // after desk-scale overrides, at most x/2
    double rho_hat = 0;
    double c_rho = 0;
    std::vector<ScaleGroup> scales;
    // the formula's scale range is empty
    bool degraded = false;
    uint64_t greedy_window = 0;
    double cover_eta = 0.05;
    std::vector<std::string> warnings;
};

Params derive_params(const SievingSystem& sys, uint64_t x, const ConstructionOptions& opts = {});

// Uniform b mod p for every prime p <= z with I_p nonempty; prime p always reads
// substream (Stage1, p), so the draw for p does not depend on z.
ShiftVector stage1_uniform(const SievingSystem& sys, uint64_t z, uint64_t seed);

// {n + qh : 1 <= h <= J} restricted to S_{hm} + b.
std::vector<int64_t> compute_AP(const SievingSystem& sys, const ShiftVector& shift, uint64_t hm, uint64_t q,
                                int64_t n, uint64_t J);

// sigma2^{-|AP|} if AP(J;q,n) lies in S_{hm,z} + b, else 0, with J = floor(K H).
double weight_lambda(const SievingSystem& sys, const ShiftVector& shift, double H, uint64_t hm, uint64_t q,
                     int64_t n, int K, uint64_t z);

// S_1 and S_2 membership over (-Ky, (K+1)y] for one scale.
struct ScaleContext {
    double H = 0;
    uint64_t hm = 0;
    uint64_t z = 0;
    uint64_t J = 0;
    int K = 0;
    uint64_t y = 0;
    double sigma2 = 1;
    SiftedWindow s1;
    SiftedWindow s2;
};

ScaleContext make_scale_context(const SievingSystem& sys, const ShiftVector& shift, double H, uint64_t hm,
                                int K, uint64_t y, uint64_t z);

struct WeightTable {
    double H = 0;
    uint64_t q = 0;
    int64_t n_lo = 0;            // values[k] belongs to n = n_lo + k, n in (-Ky, y]
    std::vector<double> values;
    std::vector<uint32_t> ap_size;  // |AP(KH;q,n)|
    double total = 0;
};

WeightTable weight_table(const ScaleContext& ctx, uint64_t q);

// Draw n with probability lambda(n)/total from substream (Stage2, q).
int64_t sample_from_table(const WeightTable& table, uint64_t seed);

struct CoverDiagnostics {
    size_t vertices = 0;
    double c2_estimate = 0;
    RoundPlan plan;
    double uncovered_fraction = 0;
    size_t fallback_samples = 0;
    HypothesisReport hypotheses;
};

struct Stage2Result {
    std::vector<std::pair<uint64_t, int64_t>> chosen;  // (q, n_q)
    std::vector<uint64_t> rejected;                    // zero weight total
    std::optional<CoverDiagnostics> cover;
    std::vector<std::string> warnings;
};

Stage2Result stage2_select(const SievingSystem& sys, const Params& params, const ShiftVector& stage1_shift,
                           uint64_t seed, Stage2Mode mode);

// Residue of b mod q that removes n: n - b lands on min(I_q).
uint64_t killing_residue(const SievingSystem& sys, uint64_t q, int64_t n);

// For each prime (ascending) choose the class that removes the most current survivors
// of (S + b) in [1, window]; ties go to the smallest residue.
std::vector<std::pair<uint64_t, uint64_t>> greedy_assign(const SievingSystem& sys, ShiftVector& shift,
                                                          const std::vector<uint64_t>& primes, uint64_t sieved_up_to,
                                                          uint64_t window);

struct CleanupResult {
    bool success = false;
    ShiftVector shift;
    uint64_t survivors = 0;  // |T|
    uint64_t available = 0;  // primes in (x/2, x] with I_q nonempty
    uint64_t matched = 0;
    uint64_t target = 0;     // the y that was cleaned
};

// Fixed target [1, y]: survivors in increasing order, each not already removed gets the
// smallest unused prime in (x/2, x]; leftover primes get uniform residues.
CleanupResult stage3_cleanup(const SievingSystem& sys, uint64_t x, const ShiftVector& partial, uint64_t y,
                             uint64_t seed);

// Same matching run until the primes are used up; target is the last cleared integer.
CleanupResult stage3_cleanup_maximal(const SievingSystem& sys, uint64_t x, const ShiftVector& partial,
                                     uint64_t seed);

// Length of the initial run [1, L] free of members of S_x + b.
uint64_t initial_empty_run(const SievingSystem& sys, uint64_t x, const ShiftVector& shift);

struct ConstructionResult {
    ShiftVector shift;
    uint64_t L = 0;
    uint64_t y = 0;
    bool reached_y = false;
    uint64_t survivors_stage1 = 0;  // counted in [1, y]
    uint64_t survivors_stage2 = 0;
    uint64_t survivors_stage3 = 0;
    size_t q_count = 0;
    std::vector<uint64_t> rejected_q;
    size_t greedy_count = 0;
    uint64_t cleanup_available = 0;
    uint64_t cleanup_matched = 0;
    std::optional<CoverDiagnostics> cover;
    bool verified = false;
};

ConstructionResult construct(const SievingSystem& sys, const Params& params, uint64_t seed, Stage2Mode mode);

struct BaselineResult {
    ShiftVector shift;
    uint64_t L = 0;
    double reference_target = 0;  // rho x / (8 C_1)
    uint64_t survivors_stage1 = 0;
    uint64_t cleanup_available = 0;
    bool verified = false;
};

// Uniform stage up to x/2 followed by the maximal clean-up.
BaselineResult trivial_baseline(const SievingSystem& sys, uint64_t x, uint64_t seed);

}  // namespace sievegap
