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

#include "construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "constants.hpp"
#include "parallel.hpp"
#include "primes.hpp"

namespace sievegap {

namespace {

uint64_t floor_to_u64(double v) {
    if (!(v > 0)) return 0;
    if (v >= 1.8e19) return std::numeric_limits<uint64_t>::max();
    return static_cast<uint64_t>(std::floor(v));
}

// nonempty-class primes in (lo, hi]
std::vector<uint64_t> sieving_primes(const SievingSystem& sys, uint64_t lo, uint64_t hi) {
    std::vector<uint64_t> out;
    sys.materialize(lo, hi);
    for (uint64_t p : primes_in(lo, hi))
        if (sys.class_count(p) > 0) out.push_back(p);
    return out;
}

// alive[i] <-> integer i + 1
void remove_classes(std::vector<char>& alive, const SievingSystem& sys, uint64_t q, uint64_t b) {
    for (uint64_t r : sys.residues(q)) {
        // n - b = r (mod q), n >= 1
        const uint64_t first = (r + b) % q;
        for (uint64_t n = first == 0 ? q : first; n <= alive.size(); n += q) alive[n - 1] = 0;
    }
}

std::vector<char> alive_bitmap(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, uint64_t window) {
    std::vector<char> alive(window, 0);
    if (window == 0) return alive;
    const auto w = sift(sys, std::max<uint64_t>(x, 1), shift, 1, static_cast<int64_t>(window));
    for (uint64_t n = 1; n <= window; ++n) alive[n - 1] = w.member(static_cast<int64_t>(n));
    return alive;
}

}  // namespace

Params derive_params(const SievingSystem& sys, uint64_t x, const ConstructionOptions& opts) {
    if (x < 10) throw InvalidArgument("derive_params: need x >= 10");
    Params P;
    P.x = x;
    if (x < 100) P.warnings.push_back("x < 100 is below the intended range");
    const double lx = std::log(static_cast<double>(x));
    const double llx = std::log(lx);

    P.rho_hat = estimate_rho(sys, x);
    const double rho_use = std::min(P.rho_hat, 1.0);
    P.c_rho = rho_use > 0 ? static_cast<double>(c_rho(rho_use)) : 0.0;
    if (opts.delta) {
        P.delta = *opts.delta;
    } else if (P.c_rho > 0) {
        P.delta = std::min(0.9 * P.c_rho, 0.45);
    } else {
        P.delta = 0.01;
        P.warnings.push_back("rho_hat = 0; delta defaulted to 0.01");
    }
    if (!(P.delta > 0 && P.delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    if (P.c_rho > 0 && P.delta >= P.c_rho) {
        P.warnings.push_back("delta >= C(rho_hat) = " + std::to_string(P.c_rho));
    }
    P.M = opts.M;
    if (!(P.M > 4 + P.delta && P.M <= 5)) throw InvalidArgument("M must satisfy 4 + delta < M <= 5");
    P.K = opts.K;
    if (P.K < 2) throw InvalidArgument("K must be >= 2");
    P.xi = opts.xi;
    if (!(P.xi > 1)) throw InvalidArgument("xi must be > 1");
    P.cover_eta = opts.cover_eta;
    if (!(P.cover_eta > 0 && P.cover_eta < 1)) throw InvalidArgument("cover eta must lie in (0, 1)");

    P.y = static_cast<uint64_t>(std::ceil(static_cast<double>(x) * std::pow(lx, P.delta)));
    P.z = static_cast<uint64_t>(std::llround(static_cast<double>(P.y) * llx / std::sqrt(lx)));

    std::vector<double> formula_scales;
    const double h_lo = 2.0 * static_cast<double>(P.y) / static_cast<double>(x);
    const double h_hi = static_cast<double>(P.y) / (P.xi * static_cast<double>(P.z));
    for (double H = 1; H <= h_hi * (1 + 1e-12); H *= P.xi) {
        if (H >= h_lo * (1 - 1e-12)) formula_scales.push_back(H);
    }
    P.degraded = formula_scales.empty();

    if (opts.force_z) {
        P.z_used = *opts.force_z;
    } else if (P.degraded) {
        P.z_used = static_cast<uint64_t>(std::llround(static_cast<double>(x) / lx));
        P.warnings.push_back("scale range [2y/x, y/(xi z)] is empty; degraded mode with z = x/log x");
    } else {
        P.z_used = P.z;
    }
    if (P.z_used > x / 2) {
        P.z_used = x / 2;
        P.warnings.push_back("z capped at x/2");
    }
    P.z_used = std::max<uint64_t>(P.z_used, 1);

    const auto& scale_list = opts.force_scales.empty() ? formula_scales : opts.force_scales;
    std::vector<uint64_t> used;
    for (double H : scale_list) {
        if (!(H >= 1)) throw InvalidArgument("scales must be >= 1");
        ScaleGroup g;
        g.H = H;
        g.hm = std::min<uint64_t>(floor_to_u64(std::pow(H, P.M)), P.z_used);
        const double yd = static_cast<double>(P.y);
        const uint64_t lo = std::max<uint64_t>(floor_to_u64(yd / (P.xi * H)), P.z_used);
        const uint64_t hi = std::min<uint64_t>(floor_to_u64(yd / H), x / 2);
        if (lo != floor_to_u64(yd / (P.xi * H)) || hi != floor_to_u64(yd / H)) {
            P.warnings.push_back("scale H=" + std::to_string(H) + " clipped to (z, x/2]");
        }
        g.target_count = std::max<uint64_t>(
            1, static_cast<uint64_t>(std::llround(P.rho_hat * (1 - 1 / P.xi) * yd / (H * lx))));
        for (uint64_t q : sieving_primes(sys, lo, hi)) {
            if (g.primes.size() >= g.target_count) break;
            if (std::find(used.begin(), used.end(), q) != used.end()) continue;
            g.primes.push_back(q);
            used.push_back(q);
        }
        P.scales.push_back(std::move(g));
    }
    P.greedy_window = opts.greedy_window ? *opts.greedy_window : P.y;
    return P;
}

ShiftVector stage1_uniform(const SievingSystem& sys, uint64_t z, uint64_t seed) {
    ShiftVector b(z);
    for (uint64_t p : sieving_primes(sys, 0, z)) b.set(p, Rng::substream(seed, Stream::Stage1, p).below(p));
    return b;
}

std::vector<int64_t> compute_AP(const SievingSystem& sys, const ShiftVector& shift, uint64_t hm, uint64_t q,
                                int64_t n, uint64_t J) {
    std::vector<int64_t> out;
    for (uint64_t h = 1; h <= J; ++h) {
        const int64_t m = n + static_cast<int64_t>(q * h);
        if (hm < 2 || is_member(sys, shift, m, 1, hm)) out.push_back(m);
    }
    return out;
}

double weight_lambda(const SievingSystem& sys, const ShiftVector& shift, double H, uint64_t hm, uint64_t q,
                     int64_t n, int K, uint64_t z) {
    const auto J = floor_to_u64(K * H + 1e-9);
    const auto ap = compute_AP(sys, shift, hm, q, n, J);
    for (int64_t m : ap) {
        if (hm < z && !is_member(sys, shift, m, hm, z)) return 0.0;
    }
    const double sigma2 = hm < z ? sigma(sys, hm, z).to_double() : 1.0;
    return std::pow(sigma2, -static_cast<double>(ap.size()));
}

ScaleContext make_scale_context(const SievingSystem& sys, const ShiftVector& shift, double H, uint64_t hm,
                                int K, uint64_t y, uint64_t z) {
    if (hm > z) throw InvalidArgument("scale context: need H^M <= z");
    ScaleContext ctx;
    ctx.H = H;
    ctx.hm = hm;
    ctx.z = z;
    ctx.K = K;
    ctx.y = y;
    ctx.J = floor_to_u64(K * H + 1e-9);
    const int64_t lo = -static_cast<int64_t>(K) * static_cast<int64_t>(y) + 1;
    const int64_t hi = static_cast<int64_t>(K + 1) * static_cast<int64_t>(y);
    ctx.s1 = sift(sys, std::max<uint64_t>(hm, 1), shift, lo, hi);
    ctx.s2 = sift(sys, std::max<uint64_t>(z, 1), shift, lo, hi, std::max<uint64_t>(hm, 1));
    ctx.sigma2 = hm < z ? sigma(sys, std::max<uint64_t>(hm, 1), z).to_double() : 1.0;
    return ctx;
}

WeightTable weight_table(const ScaleContext& ctx, uint64_t q) {
    WeightTable t;
    t.H = ctx.H;
    t.q = q;
    const int64_t Ky = static_cast<int64_t>(ctx.K) * static_cast<int64_t>(ctx.y);
    t.n_lo = -Ky + 1;
    const auto count = static_cast<size_t>(Ky + static_cast<int64_t>(ctx.y));
    if (q * ctx.J > static_cast<uint64_t>(Ky)) {
        throw InvalidArgument("weight_table: q * floor(KH) exceeds Ky; q must be <= y/H");
    }
    t.values.assign(count, 0.0);
    t.ap_size.assign(count, 0);
    const double log_s2 = std::log(ctx.sigma2);
    for (size_t k = 0; k < count; ++k) {
        const int64_t n = t.n_lo + static_cast<int64_t>(k);
        uint32_t size = 0;
        bool inside = true;
        for (uint64_t h = 1; h <= ctx.J; ++h) {
            const int64_t m = n + static_cast<int64_t>(q * h);
            if (!ctx.s1.member(m)) continue;
            ++size;
            if (!ctx.s2.member(m)) {
                inside = false;
                break;
            }
        }
        t.ap_size[k] = size;
        if (inside) t.values[k] = std::exp(-static_cast<double>(size) * log_s2);
    }
    t.total = pairwise_sum(t.values.data(), t.values.size());
    return t;
}

int64_t sample_from_table(const WeightTable& table, uint64_t seed) {
    if (!(table.total > 0)) throw DomainError("sample_from_table: zero total weight for q=" + std::to_string(table.q));
    Rng rng = Rng::substream(seed, Stream::Stage2, table.q);
    const double u = rng.uniform01() * table.total;
    double cum = 0;
    size_t last_positive = 0;
    for (size_t k = 0; k < table.values.size(); ++k) {
        if (table.values[k] <= 0) continue;
        last_positive = k;
        cum += table.values[k];
        if (cum > u) return table.n_lo + static_cast<int64_t>(k);
    }
    return table.n_lo + static_cast<int64_t>(last_positive);
}

uint64_t killing_residue(const SievingSystem& sys, uint64_t q, int64_t n) {
    const auto res = sys.residues(q);
    if (res.empty()) throw InvalidArgument("killing_residue: I_q is empty for q=" + std::to_string(q));
    const auto qi = static_cast<int64_t>(q);
    int64_t b = (n - static_cast<int64_t>(res.front())) % qi;
    if (b < 0) b += qi;
    return static_cast<uint64_t>(b);
}

Stage2Result stage2_select(const SievingSystem& sys, const Params& params, const ShiftVector& stage1_shift,
                           uint64_t seed, Stage2Mode mode) {
    Stage2Result out;
    struct Entry {
        size_t scale;
        uint64_t q;
    };
    std::vector<Entry> entries;
    for (size_t s = 0; s < params.scales.size(); ++s)
        for (uint64_t q : params.scales[s].primes) entries.push_back({s, q});
    if (entries.empty()) {
        out.warnings.push_back("no stage-2 primes (empty scale set)");
        return out;
    }
    std::vector<ScaleContext> ctx(params.scales.size());
    parallel_for(params.scales.size(), [&](size_t s) {
        const auto& g = params.scales[s];
        if (!g.primes.empty())
            ctx[s] = make_scale_context(sys, stage1_shift, g.H, g.hm, params.K, params.y, params.z_used);
    });

    std::vector<WeightTable> tables(entries.size());
    std::vector<std::optional<int64_t>> sampled(entries.size());
    const bool keep = mode == Stage2Mode::Cover;
    parallel_for(entries.size(), [&](size_t i) {
        WeightTable t = weight_table(ctx[entries[i].scale], entries[i].q);
        if (t.total > 0) sampled[i] = sample_from_table(t, seed);
        if (keep) tables[i] = std::move(t);
    });
    std::vector<size_t> live;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (!sampled[i]) {
            out.rejected.push_back(entries[i].q);
        } else {
            live.push_back(i);
        }
    }
    if (live.empty()) out.warnings.push_back("every weight total is zero; stage 2 is a no-op");

    if (mode == Stage2Mode::Sample || live.empty()) {
        for (size_t i : live) out.chosen.emplace_back(entries[i].q, *sampled[i]);
        return out;
    }

    // cover mode: vertices are the stage-1 survivors in [1, y]
    CoverDiagnostics diag;
    const auto s_window = sift(sys, std::max<uint64_t>(params.z_used, 1), stage1_shift, 1,
                               static_cast<int64_t>(params.y));
    const auto members = s_window.members();
    diag.vertices = members.size();
    std::vector<int64_t> index_of(params.y + 1, -1);
    for (size_t v = 0; v < members.size(); ++v) index_of[static_cast<size_t>(members[v])] = static_cast<int64_t>(v);

    CoverInstance inst;
    inst.n_vertices = static_cast<Vertex>(members.size());
    inst.eta = params.cover_eta;
    for (size_t i : live) {
        const auto& t = tables[i];
        const uint64_t J = ctx[entries[i].scale].J;
        std::vector<std::vector<Vertex>> outcomes;
        std::vector<double> weights;
        std::vector<int64_t> tags;
        for (size_t k = 0; k < t.values.size(); ++k) {
            if (t.values[k] <= 0) continue;
            const int64_t n = t.n_lo + static_cast<int64_t>(k);
            std::vector<Vertex> e;
            for (uint64_t h = 1; h <= J; ++h) {
                const int64_t m = n + static_cast<int64_t>(t.q * h);
                if (m >= 1 && m <= static_cast<int64_t>(params.y) && index_of[static_cast<size_t>(m)] >= 0) {
                    e.push_back(static_cast<Vertex>(index_of[static_cast<size_t>(m)]));
                }
            }
            outcomes.push_back(std::move(e));
            weights.push_back(t.values[k]);
            tags.push_back(n);
        }
        inst.edges.push_back(std::make_shared<FiniteEdge>(std::move(outcomes), std::move(weights), std::move(tags)));
    }
    inst.y = std::max<double>({static_cast<double>(params.y), static_cast<double>(inst.n_vertices),
                               static_cast<double>(inst.edges.size())});
    const auto deg = inst.degrees();
    double dsum = 0;
    for (double d : deg) dsum += d;
    diag.c2_estimate = deg.empty() ? 0.0 : dsum / static_cast<double>(deg.size());
    inst.C2 = diag.c2_estimate;
    if (inst.y > std::exp(1.0)) diag.hypotheses = check_hypotheses(inst, params.delta);

    try {
        diag.plan = plan_rounds(params.cover_eta, std::min(params.delta, 0.5), std::max(diag.c2_estimate, 1e-9));
    } catch (const DomainError&) {
        diag.plan = single_round_plan(params.cover_eta, diag.c2_estimate);
        out.warnings.push_back("C2 estimate too small for the round plan; single full-width round used");
    }
    IndexPartition part;
    try {
        part = assign_indices(inst.edges.size(), diag.plan, seed);
    } catch (const DomainError&) {
        diag.plan = single_round_plan(params.cover_eta, diag.c2_estimate);
        part = assign_indices(inst.edges.size(), diag.plan, seed);
        out.warnings.push_back("too few stage-2 primes to fill every round; single full-width round used");
    }
    const auto cov = run_cover(inst, part, seed);
    diag.uncovered_fraction = cov.uncovered_fraction;
    for (size_t e = 0; e < live.size(); ++e) {
        const size_t i = live[e];
        const auto& edge = static_cast<const FiniteEdge&>(*inst.edges[e]);
        if (cov.chosen[e]) {
            out.chosen.emplace_back(entries[i].q, edge.tag(*cov.chosen[e]));
        } else {
            out.chosen.emplace_back(entries[i].q, *sampled[i]);
            ++diag.fallback_samples;
        }
    }
    out.cover = std::move(diag);
    return out;
}

std::vector<std::pair<uint64_t, uint64_t>> greedy_assign(const SievingSystem& sys, ShiftVector& shift,
                                                          const std::vector<uint64_t>& primes, uint64_t sieved_up_to,
                                                          uint64_t window) {
    auto alive = alive_bitmap(sys, sieved_up_to, shift, window);
    // primes above sieved_up_to already present in the shift also act on the window
    for (const auto& [p, b] : shift.entries()) {
        if (p > sieved_up_to && std::find(primes.begin(), primes.end(), p) == primes.end()) {
            remove_classes(alive, sys, p, b);
        }
    }
    std::vector<std::pair<uint64_t, uint64_t>> out;
    std::vector<uint64_t> hist;
    for (uint64_t q : primes) {
        const auto res = sys.residues(q);
        if (res.empty()) continue;
        hist.assign(q, 0);
        for (uint64_t n = 1; n <= window; ++n)
            if (alive[n - 1]) ++hist[n % q];
        uint64_t best_b = 0, best = 0;
        for (uint64_t b = 0; b < q; ++b) {
            uint64_t hit = 0;
            for (uint64_t r : res) hit += hist[(r + b) % q];
            if (hit > best) {
                best = hit;
                best_b = b;
            }
        }
        shift.set(q, best_b);
        remove_classes(alive, sys, q, best_b);
        out.emplace_back(q, best_b);
    }
    return out;
}

namespace {

// Matches survivors of S_{x/2} + b in [1, window] to cleanup primes. Returns the first
// survivor that found no prime, or nullopt when the window ran out first.
std::optional<uint64_t> match_survivors(const SievingSystem& sys, uint64_t x, const ShiftVector& partial,
                                        uint64_t window, const std::vector<uint64_t>& avail, ShiftVector& shift,
                                        uint64_t& matched, uint64_t& survivors) {
    auto alive = alive_bitmap(sys, x / 2, partial, window);
    shift = partial;
    shift.set_cutoff(x);
    matched = 0;
    survivors = 0;
    for (uint64_t n = 1; n <= window; ++n) {
        if (!alive[n - 1]) continue;
        ++survivors;
        if (matched == avail.size()) return n;
        const uint64_t q = avail[matched++];
        const uint64_t b = killing_residue(sys, q, static_cast<int64_t>(n));
        shift.set(q, b);
        remove_classes(alive, sys, q, b);
    }
    return std::nullopt;
}

}  // namespace

CleanupResult stage3_cleanup(const SievingSystem& sys, uint64_t x, const ShiftVector& partial, uint64_t y,
                             uint64_t seed) {
    sys.require_nondegenerate(0, x, "stage3_cleanup");
    CleanupResult out;
    out.target = y;
    const auto avail = sieving_primes(sys, x / 2, x);
    out.available = avail.size();
    uint64_t survivors = 0;
    const auto stuck = match_survivors(sys, x, partial, y, avail, out.shift, out.matched, survivors);
    const auto alive = alive_bitmap(sys, x / 2, partial, y);
    out.survivors = static_cast<uint64_t>(std::count(alive.begin(), alive.end(), char{1}));
    if (stuck) {
        out.success = false;
        return out;
    }
    for (size_t i = out.matched; i < avail.size(); ++i) {
        out.shift.set(avail[i], Rng::substream(seed, Stream::Stage3, avail[i]).below(avail[i]));
    }
    out.success = true;
    return out;
}

CleanupResult stage3_cleanup_maximal(const SievingSystem& sys, uint64_t x, const ShiftVector& partial,
                                     uint64_t seed) {
    sys.require_nondegenerate(0, x, "stage3_cleanup");
    CleanupResult out;
    const auto avail = sieving_primes(sys, x / 2, x);
    out.available = avail.size();
    for (uint64_t window = std::max<uint64_t>(64, 4 * x);; window *= 2) {
        if (window > kMaxWindow) throw DomainError("stage3_cleanup: survivor search exceeded 2^31");
        uint64_t survivors = 0;
        const auto stuck = match_survivors(sys, x, partial, window, avail, out.shift, out.matched, survivors);
        if (stuck) {
            out.target = *stuck - 1;
            out.survivors = survivors - 1;
            out.success = true;
            // every prime is matched, so nothing is left for the random fill
            (void)seed;
            return out;
        }
    }
}

uint64_t initial_empty_run(const SievingSystem& sys, uint64_t x, const ShiftVector& shift) {
    for (uint64_t window = std::max<uint64_t>(64, 2 * x);; window *= 2) {
        if (window > kMaxWindow) throw DomainError("initial_empty_run: no member below 2^31");
        const auto w = sift(sys, x, shift, 1, static_cast<int64_t>(window));
        if (auto m = w.next_member(1)) return static_cast<uint64_t>(*m - 1);
    }
}

namespace {

bool certify(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, uint64_t L) {
    return verify_empty(sys, x, shift, 1, static_cast<int64_t>(L)) &&
           is_member(sys, shift, static_cast<int64_t>(L) + 1, 1, x);
}

uint64_t count_in(const SievingSystem& sys, uint64_t x, const ShiftVector& shift, uint64_t y) {
    return sift(sys, std::max<uint64_t>(x, 1), shift, 1, static_cast<int64_t>(y)).count();
}

}  // namespace

ConstructionResult construct(const SievingSystem& sys, const Params& params, uint64_t seed, Stage2Mode mode) {
    const uint64_t x = params.x;
    sys.require_nondegenerate(0, x, "construct");
    ConstructionResult out;
    out.y = params.y;

    ShiftVector b = stage1_uniform(sys, params.z_used, seed);
    out.survivors_stage1 = count_in(sys, params.z_used, b, params.y);

    auto st2 = stage2_select(sys, params, b, seed, mode);
    for (const auto& [q, n] : st2.chosen) b.set(q, killing_residue(sys, q, n));
    for (const auto& g : params.scales) out.q_count += g.primes.size();
    out.rejected_q = st2.rejected;
    out.cover = st2.cover;

    std::vector<uint64_t> leftover;
    for (uint64_t q : sieving_primes(sys, params.z_used, x / 2)) {
        if (!b.contains(q)) leftover.push_back(q);
    }
    out.greedy_count = greedy_assign(sys, b, leftover, params.z_used, params.greedy_window).size();
    b.set_cutoff(x / 2);
    out.survivors_stage2 = count_in(sys, x / 2, b, params.y);

    auto clean = stage3_cleanup_maximal(sys, x, b, seed);
    out.cleanup_available = clean.available;
    out.cleanup_matched = clean.matched;
    out.shift = std::move(clean.shift);
    out.survivors_stage3 = count_in(sys, x, out.shift, params.y);

    out.L = initial_empty_run(sys, x, out.shift);
    out.verified = certify(sys, x, out.shift, out.L);
    if (!out.verified || out.L != clean.target) {
        throw std::logic_error("construct: certificate failed for L=" + std::to_string(out.L));
    }
    out.reached_y = out.L >= params.y;
    return out;
}

BaselineResult trivial_baseline(const SievingSystem& sys, uint64_t x, uint64_t seed) {
    if (x < 10) throw InvalidArgument("trivial_baseline: need x >= 10");
    sys.require_nondegenerate(0, x, "trivial_baseline");
    BaselineResult out;
    ShiftVector b = stage1_uniform(sys, x / 2, seed);
    auto clean = stage3_cleanup_maximal(sys, x, b, seed);
    out.cleanup_available = clean.available;
    out.survivors_stage1 = clean.survivors;
    out.shift = std::move(clean.shift);
    out.L = initial_empty_run(sys, x, out.shift);
    out.verified = certify(sys, x, out.shift, out.L);
    if (!out.verified || out.L != clean.target) {
        throw std::logic_error("trivial_baseline: certificate failed for L=" + std::to_string(out.L));
    }
    const double C1 = sigma(sys, 1, x).to_double() * std::log(static_cast<double>(x));
    out.reference_target = C1 > 0 ? estimate_rho(sys, x) * static_cast<double>(x) / (8.0 * C1) : 0.0;
    return out;
}

}  // namespace sievegap
