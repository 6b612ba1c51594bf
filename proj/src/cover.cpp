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

#include "cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "parallel.hpp"
#include "primes.hpp"

namespace sievegap {

void RandomEdge::for_each_vertex_probability(const std::function<void(Vertex, double)>& f) const {
    std::map<Vertex, double> acc;
    std::vector<Vertex> buf;
    for (size_t k = 0; k < support_size(); ++k) {
        outcome(k, buf);
        for (Vertex v : buf) acc[v] += weight(k);
    }
    for (auto [v, p] : acc) f(v, p);
}

void RandomEdge::for_each_pair_probability(const std::function<void(Vertex, Vertex, double)>& f) const {
    std::map<std::pair<Vertex, Vertex>, double> acc;
    std::vector<Vertex> buf;
    for (size_t k = 0; k < support_size(); ++k) {
        outcome(k, buf);
        for (size_t a = 0; a < buf.size(); ++a)
            for (size_t b = a + 1; b < buf.size(); ++b) acc[{buf[a], buf[b]}] += weight(k);
    }
    for (auto [vw, p] : acc) f(vw.first, vw.second, p);
}

std::optional<size_t> RandomEdge::sample_within(const std::vector<char>& alive, Rng& rng) const {
    std::vector<Vertex> buf;
    std::vector<size_t> ok;
    std::vector<double> cum;
    double mass = 0;
    for (size_t k = 0; k < support_size(); ++k) {
        outcome(k, buf);
        if (std::all_of(buf.begin(), buf.end(), [&](Vertex v) { return alive[v] != 0; })) {
            mass += weight(k);
            ok.push_back(k);
            cum.push_back(mass);
        }
    }
    if (ok.empty() || mass <= 0) return std::nullopt;
    const double u = rng.uniform01() * mass;
    const size_t idx = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    return ok[std::min(idx, ok.size() - 1)];
}

bool RandomEdge::in_support(const std::vector<Vertex>& set) const {
    std::vector<Vertex> buf;
    for (size_t k = 0; k < support_size(); ++k) {
        if (weight(k) <= 0) continue;
        outcome(k, buf);
        if (buf == set) return true;
    }
    return false;
}

FiniteEdge::FiniteEdge(std::vector<std::vector<Vertex>> outcomes, std::vector<double> weights,
                       std::vector<int64_t> tags) {
    if (outcomes.size() != weights.size()) throw InvalidArgument("FiniteEdge: outcome/weight size mismatch");
    if (!tags.empty() && tags.size() != outcomes.size()) throw InvalidArgument("FiniteEdge: tag size mismatch");
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) throw InvalidArgument("FiniteEdge: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0) throw InvalidArgument("FiniteEdge: total weight must be positive");
    offsets_.push_back(0);
    for (size_t k = 0; k < outcomes.size(); ++k) {
        if (weights[k] == 0) continue;
        auto& o = outcomes[k];
        std::sort(o.begin(), o.end());
        o.erase(std::unique(o.begin(), o.end()), o.end());
        flat_.insert(flat_.end(), o.begin(), o.end());
        offsets_.push_back(flat_.size());
        weights_.push_back(weights[k] / total);
        tags_.push_back(tags.empty() ? static_cast<int64_t>(k) : tags[k]);
        max_size_ = std::max(max_size_, o.size());
    }
}

void FiniteEdge::outcome(size_t k, std::vector<Vertex>& out) const {
    out.assign(flat_.begin() + static_cast<std::ptrdiff_t>(offsets_[k]),
               flat_.begin() + static_cast<std::ptrdiff_t>(offsets_[k + 1]));
}

ProgressionSingletonEdge::ProgressionSingletonEdge(Vertex a, Vertex d, Vertex n) : a_(a), d_(d) {
    if (d == 0 || n % d != 0 || a >= d) throw InvalidArgument("progression edge needs d | n and a < d");
    count_ = n / d;
}

void ProgressionSingletonEdge::outcome(size_t k, std::vector<Vertex>& out) const {
    out.assign(1, a_ + d_ * static_cast<Vertex>(k));
}

void ProgressionSingletonEdge::for_each_vertex_probability(const std::function<void(Vertex, double)>& f) const {
    const double p = 1.0 / static_cast<double>(count_);
    for (Vertex k = 0; k < count_; ++k) f(a_ + d_ * k, p);
}

std::optional<size_t> ProgressionSingletonEdge::sample_within(const std::vector<char>& alive, Rng& rng) const {
    uint64_t live = 0;
    for (Vertex k = 0; k < count_; ++k) live += alive[a_ + d_ * k] != 0;
    if (live == 0) return std::nullopt;
    uint64_t pick = rng.below(live);
    for (Vertex k = 0; k < count_; ++k) {
        if (!alive[a_ + d_ * k]) continue;
        if (pick-- == 0) return k;
    }
    return std::nullopt;
}

std::vector<double> CoverInstance::degrees() const {
    std::vector<double> deg(n_vertices, 0.0);
    for (const auto& e : edges) e->for_each_vertex_probability([&](Vertex v, double p) { deg[v] += p; });
    return deg;
}

bool HypothesisReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass || c.informational; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

HypothesisReport check_hypotheses(const CoverInstance& inst, double delta) {
    if (inst.y <= std::exp(1.0)) throw InvalidArgument("check_hypotheses: need y > e");
    HypothesisReport rep;
    const double y = inst.y;
    const double lly = std::log(std::log(y));

    HypothesisCheck counts{"counts", true, 0, y, -1};
    counts.worst = std::max<double>(inst.n_vertices, static_cast<double>(inst.edges.size()));
    counts.pass = counts.worst <= y;
    rep.checks.push_back(counts);

    HypothesisCheck size{"edge_size", true, 0, std::sqrt(std::log(y)) / lly, -1};
    HypothesisCheck sparse{"sparsity", true, 0, std::pow(y, -0.51), -1};
    std::vector<double> deg(inst.n_vertices, 0.0);
    std::unordered_map<uint64_t, double> codeg;
    for (size_t i = 0; i < inst.edges.size(); ++i) {
        const auto& e = *inst.edges[i];
        if (static_cast<double>(e.max_size()) > size.worst) {
            size.worst = static_cast<double>(e.max_size());
            size.where = static_cast<int64_t>(i);
        }
        e.for_each_vertex_probability([&](Vertex v, double p) {
            deg[v] += p;
            if (p > sparse.worst) {
                sparse.worst = p;
                sparse.where = static_cast<int64_t>(i);
            }
        });
        if (e.max_size() >= 2) {
            e.for_each_pair_probability([&](Vertex v, Vertex w, double p) {
                codeg[(static_cast<uint64_t>(v) << 32) | w] += p;
            });
        }
    }
    size.pass = size.worst <= size.bound;
    sparse.pass = sparse.worst <= sparse.bound;
    rep.checks.push_back(size);
    rep.checks.push_back(sparse);

    HypothesisCheck co{"codegree", true, 0, std::pow(y, -0.5), -1};
    for (auto [key, p] : codeg) {
        if (p > co.worst) {
            co.worst = p;
            co.where = static_cast<int64_t>(key >> 32);
        }
    }
    co.pass = co.worst <= co.bound;
    rep.checks.push_back(co);

    HypothesisCheck uni{"uniform_degree", true, 0, inst.eta, -1};
    for (Vertex v = 0; v < inst.n_vertices; ++v) {
        const double dev = std::abs(deg[v] - inst.C2);
        if (dev > uni.worst) {
            uni.worst = dev;
            uni.where = v;
        }
    }
    uni.pass = uni.worst <= uni.bound;
    rep.checks.push_back(uni);

    HypothesisCheck c2{"c2_range", true, inst.C2, std::pow(10.0, 2 * delta), -1};
    c2.pass = inst.C2 >= c2.bound && inst.C2 <= 100;
    rep.checks.push_back(c2);

    // hypothesis needs eta >= 1/((log y)^delta log log y); only meaningful asymptotically
    HypothesisCheck eta{"eta_lower_bound", true, inst.eta, 1.0 / (std::pow(std::log(y), delta) * lly), -1};
    eta.pass = inst.eta >= eta.bound;
    eta.informational = true;
    rep.checks.push_back(eta);
    return rep;
}

namespace {

RoundPlan finish_plan(double beta, double eta, double C2) {
    RoundPlan plan;
    plan.beta = beta;
    plan.eta = eta;
    plan.C2 = C2;
    plan.m = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / eta) / std::log(beta) - 1e-12)));
    double start = 0;
    for (int j = 1; j <= plan.m; ++j) {
        const double len = std::pow(beta, 1 - j) * std::log(beta) / C2;
        plan.intervals.emplace_back(start, start + len);
        start += len;
    }
    if (start > 1 + 1e-12) {
        throw DomainError("plan_rounds: intervals need total length " + std::to_string(start) +
                          " > 1; C2 must be at least beta log(beta)/(beta-1)");
    }
    return plan;
}

}  // namespace

RoundPlan plan_rounds(double eta, double delta, double C2, std::optional<double> beta_override) {
    if (!(eta > 0 && eta < 1)) throw InvalidArgument("plan_rounds: need 0 < eta < 1");
    if (!(delta > 0 && delta <= 0.5)) throw InvalidArgument("plan_rounds: need 0 < delta <= 1/2");
    if (!(C2 > 0)) throw InvalidArgument("plan_rounds: need C2 > 0");
    const double target = std::pow(10.0, 2 * delta);
    auto admissible = [&](double b) { return b > target && target > b * std::log(b) / (b - 1); };
    if (beta_override) {
        if (!admissible(*beta_override)) {
            throw DomainError("plan_rounds: beta=" + std::to_string(*beta_override) + " violates beta > 10^{2 delta} > beta log beta/(beta-1)");
        }
        return finish_plan(*beta_override, eta, C2);
    }
    for (int k = 1; k <= 100000; ++k) {
        const double b = target + 0.1 * k;
        if (admissible(b)) return finish_plan(b, eta, C2);
    }
    throw DomainError("plan_rounds: no admissible beta on the grid");
}

RoundPlan single_round_plan(double eta, double C2) {
    RoundPlan plan;
    plan.beta = 0;
    plan.m = 1;
    plan.eta = eta;
    plan.C2 = C2;
    plan.intervals = {{0.0, 1.0}};
    plan.fallback = true;
    return plan;
}

IndexPartition assign_indices(size_t s, const RoundPlan& plan, uint64_t seed, int max_retries) {
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        Rng rng = Rng::substream(seed, Stream::CoverPartition, static_cast<uint64_t>(attempt));
        IndexPartition part(plan.intervals.size());
        for (size_t i = 0; i < s; ++i) {
            const double t = rng.uniform01();
            for (size_t j = 0; j < plan.intervals.size(); ++j) {
                const auto [a, b] = plan.intervals[j];
                if (t >= a && t < b) {
                    part[j].push_back(static_cast<uint32_t>(i));
                    break;
                }
            }
        }
        if (std::none_of(part.begin(), part.end(), [](const auto& v) { return v.empty(); })) return part;
    }
    throw DomainError("assign_indices: some I_j stayed empty after " + std::to_string(max_retries) + " retries");
}

DegreeProfile degree_profile(const CoverInstance& inst, const IndexPartition& partition) {
    DegreeProfile prof;
    const size_t m = partition.size();
    prof.d.assign(m, std::vector<double>(inst.n_vertices, 0.0));
    parallel_for(m, [&](size_t j) {
        for (uint32_t i : partition[j]) {
            inst.edges.at(i)->for_each_vertex_probability([&](Vertex v, double p) { prof.d[j][v] += p; });
        }
    });
    prof.P.assign(m + 1, std::vector<double>(inst.n_vertices, 1.0));
    for (size_t j = 0; j < m; ++j) {
        for (Vertex v = 0; v < inst.n_vertices; ++v) {
            prof.P[j + 1][v] = prof.P[j][v] * std::exp(-prof.d[j][v] / prof.P[j][v]);
        }
    }
    for (const auto& row : prof.P)
        for (double p : row) prof.kappa = std::min(prof.kappa, p);
    return prof;
}

CoverOutcome run_cover(const CoverInstance& inst, const IndexPartition& partition, uint64_t seed) {
    CoverOutcome out;
    out.chosen.assign(inst.edges.size(), std::nullopt);
    std::vector<char> alive(inst.n_vertices, 1);
    for (size_t j = 0; j < partition.size(); ++j) {
        const auto& idx = partition[j];
        const std::vector<char> W = alive;
        std::vector<std::optional<size_t>> picks(idx.size());
        parallel_for(idx.size(), [&](size_t t) {
            Rng rng = Rng::substream(seed, Stream::CoverEdge, (static_cast<uint64_t>(j) << 40) | idx[t]);
            picks[t] = inst.edges.at(idx[t])->sample_within(W, rng);
        });
        std::vector<Vertex> buf;
        for (size_t t = 0; t < idx.size(); ++t) {
            out.chosen[idx[t]] = picks[t];
            if (!picks[t]) continue;
            inst.edges[idx[t]]->outcome(*picks[t], buf);
            for (Vertex v : buf) alive[v] = 0;
        }
    }
    std::vector<char> reachable(inst.n_vertices, 0);
    for (const auto& e : inst.edges) e->for_each_vertex_probability([&](Vertex v, double p) {
        if (p > 0) reachable[v] = 1;
    });
    for (Vertex v = 0; v < inst.n_vertices; ++v) {
        if (alive[v]) out.uncovered.push_back(v);
        if (!reachable[v]) out.never_coverable.push_back(v);
    }
    out.uncovered_fraction =
        inst.n_vertices == 0 ? 0.0 : static_cast<double>(out.uncovered.size()) / inst.n_vertices;
    return out;
}

CoverInstance calibrated_family(Vertex n_vertices, double C2, double eta, uint64_t seed) {
    if (n_vertices < 2) throw InvalidArgument("calibrated_family: need at least 2 vertices");
    const double s_real = C2 * n_vertices;
    const auto s = static_cast<uint64_t>(std::llround(s_real));
    if (s == 0 || std::abs(s_real - static_cast<double>(s)) > 1e-9) {
        throw InvalidArgument("calibrated_family: C2 * |V| must be a positive integer");
    }
    CoverInstance inst;
    inst.n_vertices = n_vertices;
    inst.C2 = C2;
    inst.eta = eta;
    inst.y = std::max<double>(n_vertices, static_cast<double>(s));
    const double cap = static_cast<double>(n_vertices) * std::pow(inst.y, -0.51);
    std::vector<Vertex> divisors;
    for (Vertex d = 1; d <= n_vertices && d <= cap; ++d)
        if (n_vertices % d == 0) divisors.push_back(d);

    Rng rng = Rng::substream(seed, Stream::Fixture, 0xC0E5);
    uint64_t remaining = s;
    while (remaining > 0) {
        std::vector<Vertex> fit;
        for (Vertex d : divisors)
            if (d <= remaining) fit.push_back(d);
        const Vertex d = fit[rng.below(fit.size())];
        for (Vertex a = 0; a < d; ++a) inst.edges.push_back(std::make_shared<ProgressionSingletonEdge>(a, d, n_vertices));
        remaining -= d;
    }
    for (size_t i = inst.edges.size(); i > 1; --i) std::swap(inst.edges[i - 1], inst.edges[rng.below(i)]);
    return inst;
}

}  // namespace sievegap
