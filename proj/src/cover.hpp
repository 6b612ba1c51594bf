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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rng.hpp"

namespace sievegap {

using Vertex = uint32_t;

// A random subset of V with finite support: outcome k occurs with weight(k),
// and the weights sum to 1.
class RandomEdge {
public:
    virtual ~RandomEdge() = default;

    virtual size_t support_size() const = 0;
    virtual double weight(size_t k) const = 0;
    virtual void outcome(size_t k, std::vector<Vertex>& out) const = 0;
    virtual size_t max_size() const = 0;
    // (v, Pr(v in e)) for every v with positive probability
    virtual void for_each_vertex_probability(const std::function<void(Vertex, double)>& f) const;
    // (v, w, Pr(v, w in e)) for v < w with positive probability
    virtual void for_each_pair_probability(const std::function<void(Vertex, Vertex, double)>& f) const;
    // Outcome drawn conditioned on lying inside the alive set; nullopt when that has mass 0.
    virtual std::optional<size_t> sample_within(const std::vector<char>& alive, Rng& rng) const;
    // True when `set` (sorted) is an outcome of positive weight.
    bool in_support(const std::vector<Vertex>& set) const;
};

// Explicit outcome list. Weights are normalized on construction; zero-weight outcomes are dropped.
class FiniteEdge final : public RandomEdge {
public:
    FiniteEdge(std::vector<std::vector<Vertex>> outcomes, std::vector<double> weights,
               std::vector<int64_t> tags = {});

    size_t support_size() const override { return weights_.size(); }
    double weight(size_t k) const override { return weights_[k]; }
    void outcome(size_t k, std::vector<Vertex>& out) const override;
    size_t max_size() const override { return max_size_; }
    // caller-supplied label of outcome k (e.g. the residue it came from)
    int64_t tag(size_t k) const { return tags_[k]; }

private:
    std::vector<uint64_t> offsets_;
    std::vector<Vertex> flat_;
    std::vector<double> weights_;
    std::vector<int64_t> tags_;
    size_t max_size_ = 0;
};

// The singleton {a + d*k}, k uniform in [0, n/d); used by the calibrated family.
class ProgressionSingletonEdge final : public RandomEdge {
public:
    ProgressionSingletonEdge(Vertex a, Vertex d, Vertex n);

    size_t support_size() const override { return count_; }
    double weight(size_t) const override { return 1.0 / static_cast<double>(count_); }
    void outcome(size_t k, std::vector<Vertex>& out) const override;
    size_t max_size() const override { return 1; }
    void for_each_vertex_probability(const std::function<void(Vertex, double)>& f) const override;
    void for_each_pair_probability(const std::function<void(Vertex, Vertex, double)>&) const override {}
    std::optional<size_t> sample_within(const std::vector<char>& alive, Rng& rng) const override;

private:
    Vertex a_, d_, count_;
};

struct CoverInstance {
    Vertex n_vertices = 0;
    std::vector<std::shared_ptr<const RandomEdge>> edges;
    double y = 0;    // scale parameter: |V| <= y and s <= y
    double eta = 0;
    double C2 = 0;

    // sum_i Pr(v in e_i)
    std::vector<double> degrees() const;
};

struct HypothesisCheck {
    std::string name;
    bool pass = true;
    double worst = 0;   // worst observed value
    double bound = 0;
    int64_t where = -1;  // offending vertex or edge index, -1 if none
    bool informational = false;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    bool all_pass() const;
    const HypothesisCheck* find(const std::string& name) const;
};

HypothesisReport check_hypotheses(const CoverInstance& instance, double delta);

struct RoundPlan {
    double beta = 0;
    int m = 0;
    double eta = 0;
    double C2 = 0;
    std::vector<std::pair<double, double>> intervals;  // [a, b) inside [0, 1]
    // true when the fallback single full-width round is used
    bool fallback = false;
};

// beta: first point of the grid 10^{2 delta} + k/10 (k >= 1) satisfying
// beta > 10^{2 delta} > beta log(beta)/(beta-1), unless beta_override is given.
RoundPlan plan_rounds(double eta, double delta, double C2, std::optional<double> beta_override = std::nullopt);
// One round over the whole of [0, 1].
RoundPlan single_round_plan(double eta, double C2);

using IndexPartition = std::vector<std::vector<uint32_t>>;  // I_1..I_m

// t_i uniform in [0,1], I_j = {i : t_i in interval j}. Retries with fresh draws
// while some I_j is empty, up to max_retries.
IndexPartition assign_indices(size_t s, const RoundPlan& plan, uint64_t seed, int max_retries = 100);

struct DegreeProfile {
    std::vector<std::vector<double>> d;  // d[j][v] = d_{I_{j+1}}(v)
    std::vector<std::vector<double>> P;  // P[j][v], j = 0..m
    double kappa = 1;                    // min over j, v of P_j(v)
};

DegreeProfile degree_profile(const CoverInstance& instance, const IndexPartition& partition);

struct CoverOutcome {
    std::vector<std::optional<size_t>> chosen;  // accepted outcome per edge index, nullopt = empty
    std::vector<Vertex> uncovered;
    std::vector<Vertex> never_coverable;  // vertices no edge can reach
    double uncovered_fraction = 0;
};

// Round j: with W the uncovered set at the start of the round, each i in I_j draws
// e_i conditioned on e_i inside W (empty if that has probability 0).
CoverOutcome run_cover(const CoverInstance& instance, const IndexPartition& partition, uint64_t seed);

// Singleton edges uniform on classes a mod d, d | n_vertices with d/n <= y^{-51/100},
// arranged in full tilings so every vertex has degree exactly C2 (C2 * n integer).
CoverInstance calibrated_family(Vertex n_vertices, double C2, double eta, uint64_t seed);

}  // namespace sievegap
