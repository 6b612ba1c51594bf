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

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "applications.hpp"
#include "constants.hpp"
#include "construction.hpp"
#include "cover.hpp"
#include "moments.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "rng.hpp"
#include "sieve_system.hpp"
#include "sifted_window.hpp"
#include "system_file.hpp"

namespace sievegap {

using nlohmann::json;

namespace {

const std::map<std::string, std::vector<std::string>>& command_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"system-info", {"system", "x", "drift_ratio"}},
        {"gaps", {"system", "x", "window", "z", "shift_file"}},
        {"construct",
         {"system", "x", "delta", "mode", "trials", "force_z", "force_scales", "M", "K", "xi", "shift_out"}},
        {"cover-demo", {"vertices", "edges", "c2", "eta", "delta", "beta", "trials"}},
        {"moments", {"system", "identity", "trials", "exact", "z", "y", "H", "M", "K", "hm", "xi", "q_lo", "q_hi"}},
        {"constants", {"rho", "tol", "derangement"}},
        {"composite-runs", {"poly", "X", "constructed"}},
        {"coprime", {"poly", "k", "bound", "constructed", "xs", "seeds"}},
    };
    return keys;
}

// Reads parameters from the request and records the value actually used.
class Args {
public:
    Args(const json& in, json& resolved) : in_(in), out_(resolved) {}

    template <class T>
    T get(const std::string& key, T def) {
        T v = in_.contains(key) && !in_[key].is_null() ? read<T>(key) : def;
        out_[key] = v;
        return v;
    }

    template <class T>
    T require(const std::string& key) {
        if (!in_.contains(key) || in_[key].is_null()) throw InvalidArgument("missing required parameter --" + flag(key));
        T v = read<T>(key);
        out_[key] = v;
        return v;
    }

    template <class T>
    std::optional<T> opt(const std::string& key) {
        if (!in_.contains(key) || in_[key].is_null()) {
            out_[key] = nullptr;
            return std::nullopt;
        }
        T v = read<T>(key);
        out_[key] = v;
        return v;
    }

private:
    static std::string flag(std::string key) {
        std::replace(key.begin(), key.end(), '_', '-');
        return key;
    }

    template <class T>
    T read(const std::string& key) {
        const auto& v = in_[key];
        if constexpr (std::is_same_v<T, uint64_t> || std::is_same_v<T, int>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)) {
                throw InvalidArgument("--" + flag(key) + " must be a non-negative integer");
            }
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw InvalidArgument("--" + flag(key) + " must be a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw InvalidArgument("--" + flag(key) + " must be true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw InvalidArgument("--" + flag(key) + " must be a string");
        }
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw InvalidArgument("--" + flag(key) + " has the wrong type");
        }
    }

    const json& in_;
    json& out_;
};

std::pair<int64_t, int64_t> parse_window(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw InvalidArgument("--window must look like LO..HI");
    try {
        size_t a = 0, b = 0;
        const std::string l = s.substr(0, dots), r = s.substr(dots + 2);
        const int64_t lo = std::stoll(l, &a);
        const int64_t hi = std::stoll(r, &b);
        if (a != l.size() || b != r.size()) throw std::invalid_argument("trailing");
        if (lo > hi) throw InvalidArgument("--window needs LO <= HI");
        return {lo, hi};
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const InvalidArgument*>(&e)) throw;
        throw InvalidArgument("--window must look like LO..HI with integer bounds");
    }
}

json system_json(const SievingSystem& sys) {
    static const char* kinds[] = {"eratosthenes", "polynomial", "table", "twin"};
    json j = {{"name", sys.name()}, {"kind", kinds[static_cast<int>(sys.kind())]}, {"degree", sys.degree()}};
    if (const auto* f = sys.polynomial_ptr()) j["polynomial"] = f->to_string();
    return j;
}

json hypotheses_json(const HypothesisReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"worst", c.worst},
                          {"bound", c.bound},
                          {"where", c.where},
                          {"informational", c.informational}});
    }
    return {{"all_pass", rep.all_pass()}, {"checks", checks}};
}

json plan_json(const RoundPlan& p) {
    json iv = json::array();
    for (const auto& [a, b] : p.intervals) iv.push_back({a, b});
    return {{"beta", p.beta}, {"m", p.m}, {"eta", p.eta}, {"C2", p.C2}, {"intervals", iv}, {"fallback", p.fallback}};
}

json params_json(const Params& p) {
    json scales = json::array();
    for (const auto& g : p.scales) {
        scales.push_back({{"H", g.H}, {"hm", g.hm}, {"q_count", g.primes.size()}, {"target_count", g.target_count}});
    }
    return {{"x", p.x},
            {"delta", p.delta},
            {"M", p.M},
            {"K", p.K},
            {"xi", p.xi},
            {"y", p.y},
            {"z", p.z},
            {"z_used", p.z_used},
            {"rho_hat", p.rho_hat},
            {"c_rho", p.c_rho},
            {"degraded", p.degraded},
            {"greedy_window", p.greedy_window},
            {"scales", scales},
            {"warnings", p.warnings}};
}

struct Stats {
    double mean = 0, sd = 0, min = 0, median = 0, max = 0;
};

Stats stats_of(std::vector<double> v) {
    Stats s;
    if (v.empty()) return s;
    s.mean = pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - s.mean) * (v[i] - s.mean);
    if (v.size() > 1) s.sd = std::sqrt(pairwise_sum(dev.data(), dev.size()) / static_cast<double>(v.size() - 1));
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    const size_t n = v.size();
    s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return s;
}

json stats_json(const Stats& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

json moment_json(const MomentReport& r) {
    return {{"identity", r.identity},
            {"predicted", r.predicted},
            {"estimated", r.estimated},
            {"std_error", r.std_error},
            {"trials", r.trials},
            {"z_score", r.z_score},
            {"relative_deviation", r.relative_deviation},
            {"exact", r.exact},
            {"exact_mean", r.exact_mean.empty() ? json(nullptr) : json(r.exact_mean)},
            {"exact_predicted", r.exact_predicted.empty() ? json(nullptr) : json(r.exact_predicted)},
            {"warnings", r.warnings}};
}

// trial 0 runs on the seed itself so a single trial matches the library call
uint64_t trial_seed(uint64_t seed, uint64_t t) { return t == 0 ? seed : derive_seed(seed, Stream::Trial, t); }

json cmd_system_info(Args& a) {
    const auto sys = resolve_system(a.require<std::string>("system"));
    const auto x = a.require<uint64_t>("x");
    const auto drift = a.get<double>("drift_ratio", 0.1);
    const auto rep = system_info(sys, x, drift);
    json track = json::array();
    for (const auto& [xi, v] : rep.mertens_track) track.push_back({{"x", xi}, {"sigma_log_x", v}});
    return {{"system", system_json(sys)},
            {"x", rep.x},
            {"sigma", rep.sigma},
            {"sigma_rel_error", rep.sigma_rel_error},
            {"period_bitlength", rep.period_bitlength},
            {"rho_hat", rep.rho_hat},
            {"rho_share", rep.rho_share},
            {"bound_B", rep.bound_B},
            {"degenerate_prime", rep.degenerate_prime ? json(*rep.degenerate_prime) : json(nullptr)},
            {"mertens_track", track},
            {"drift_ratio", rep.drift_ratio},
            {"one_dimensional", rep.one_dimensional},
            {"warnings", rep.warnings}};
}

json cmd_gaps(Args& a) {
    const auto sys = resolve_system(a.require<std::string>("system"));
    const auto x = a.require<uint64_t>("x");
    const auto [lo, hi] = parse_window(a.require<std::string>("window"));
    const auto z = a.get<uint64_t>("z", 1);
    const auto file = a.opt<std::string>("shift_file");
    const ShiftVector shift = file ? read_shift_file(*file) : ShiftVector(x);
    const auto g = largest_gap_chunked(sys, x, shift, lo, hi, z);
    return {{"system", system_json(sys)}, {"window", {{"lo", lo}, {"hi", hi}}}, {"gap", g.length},
            {"left", g.left},             {"members_count", g.members},       {"sentinel", g.sentinel}};
}

json construction_json(const ConstructionResult& r, const BaselineResult& b, uint64_t seed) {
    json j = {{"seed", seed},
              {"L", r.L},
              {"baseline_L", b.L},
              {"beats_baseline", r.L >= b.L},
              {"reached_y", r.reached_y},
              {"verified", r.verified && b.verified},
              {"survivors_by_stage",
               {{"stage1", r.survivors_stage1}, {"stage2", r.survivors_stage2}, {"stage3", r.survivors_stage3}}},
              {"q_count", r.q_count},
              {"rejected_q_count", r.rejected_q.size()},
              {"greedy_count", r.greedy_count},
              {"cleanup_available", r.cleanup_available},
              {"cleanup_matched", r.cleanup_matched}};
    return j;
}

json cmd_construct(Args& a, uint64_t seed) {
    const auto sys = resolve_system(a.require<std::string>("system"));
    const auto x = a.require<uint64_t>("x");
    ConstructionOptions o;
    o.delta = a.opt<double>("delta");
    o.M = a.get<double>("M", o.M);
    o.K = a.get<int>("K", o.K);
    o.xi = a.get<double>("xi", o.xi);
    o.force_z = a.opt<uint64_t>("force_z");
    o.force_scales = a.get<std::vector<double>>("force_scales", {});
    const auto mode_s = a.get<std::string>("mode", "sample");
    if (mode_s != "sample" && mode_s != "cover") throw InvalidArgument("--mode must be sample or cover");
    const auto mode = mode_s == "cover" ? Stage2Mode::Cover : Stage2Mode::Sample;
    const auto trials = a.get<uint64_t>("trials", 1);
    if (trials == 0) throw InvalidArgument("--trials must be at least 1");
    const auto shift_out = a.opt<std::string>("shift_out");

    const auto params = derive_params(sys, x, o);
    json runs = json::array();
    std::optional<ConstructionResult> best;
    BaselineResult best_base;
    uint64_t wins = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        const uint64_t s = trial_seed(seed, t);
        auto r = construct(sys, params, s, mode);
        auto b = trivial_baseline(sys, x, s);
        if (r.L >= b.L) ++wins;
        runs.push_back(construction_json(r, b, s));
        if (!best || r.L > best->L) {
            best = std::move(r);
            best_base = std::move(b);
        }
    }
    if (shift_out) write_shift_file(*shift_out, best->shift);
    json out = construction_json(*best, best_base, runs[0]["seed"].get<uint64_t>());
    out.erase("seed");
    out["system"] = system_json(sys);
    out["params"] = params_json(params);
    out["best_seed"] = nullptr;
    for (const auto& r : runs)
        if (r["L"].get<uint64_t>() == best->L) {
            out["best_seed"] = r["seed"];
            break;
        }
    out["baseline_reference_target"] = best_base.reference_target;
    out["success_rate"] = static_cast<double>(wins) / static_cast<double>(trials);
    out["trials"] = runs;
    if (best->cover) {
        const auto& c = *best->cover;
        out["cover"] = {{"vertices", c.vertices},
                        {"c2_estimate", c.c2_estimate},
                        {"plan", plan_json(c.plan)},
                        {"uncovered_fraction", c.uncovered_fraction},
                        {"fallback_samples", c.fallback_samples},
                        {"hypotheses", hypotheses_json(c.hypotheses)}};
    } else {
        out["cover"] = nullptr;
    }
    return out;
}

json cmd_cover_demo(Args& a, uint64_t seed) {
    const auto n = a.get<uint64_t>("vertices", 10000);
    const auto edges = a.opt<uint64_t>("edges");
    const auto c2_in = a.opt<double>("c2");
    const auto eta = a.get<double>("eta", 0.05);
    const auto delta = a.get<double>("delta", 0.25);
    const auto beta = a.opt<double>("beta");
    const auto trials = a.get<uint64_t>("trials", 100);
    if (n == 0) throw InvalidArgument("--vertices must be positive");
    if (trials == 0) throw InvalidArgument("--trials must be at least 1");
    double c2 = 4.0;
    if (c2_in) {
        c2 = *c2_in;
        if (edges && std::llround(c2 * static_cast<double>(n)) != static_cast<long long>(*edges)) {
            throw InvalidArgument("--edges must equal c2 * vertices for the calibrated family");
        }
    } else if (edges) {
        c2 = static_cast<double>(*edges) / static_cast<double>(n);
    }

    const auto inst = calibrated_family(static_cast<Vertex>(n), c2, eta, seed);
    const auto hyp = check_hypotheses(inst, delta);
    const auto plan = plan_rounds(eta, delta, c2, beta);
    std::vector<double> frac(trials);
    for (uint64_t t = 0; t < trials; ++t) {
        const auto part = assign_indices(inst.edges.size(), plan, derive_seed(seed, Stream::CoverPartition, t));
        frac[t] = run_cover(inst, part, derive_seed(seed, Stream::CoverEdge, t)).uncovered_fraction;
    }
    const double threshold = 10 * eta;
    const auto ok = std::count_if(frac.begin(), frac.end(), [&](double f) { return f <= threshold; });
    return {{"vertices", inst.n_vertices},
            {"edges", inst.edges.size()},
            {"c2", c2},
            {"eta", eta},
            {"hypotheses", hypotheses_json(hyp)},
            {"plan", plan_json(plan)},
            {"uncovered_fraction", stats_json(stats_of(frac))},
            {"success_threshold", threshold},
            {"success_rate", static_cast<double>(ok) / static_cast<double>(trials)}};
}

json cmd_moments(Args& a, uint64_t seed) {
    const auto sys = resolve_system(a.require<std::string>("system"));
    const auto identity = a.require<std::string>("identity");
    const auto trials = a.get<uint64_t>("trials", 1000);
    const auto exact = a.get<bool>("exact", false);
    const auto z = a.get<uint64_t>("z", 200);
    const auto y = a.get<uint64_t>("y", 2000);
    json instance = {{"z", z}, {"y", y}};
    MomentReport r;
    if (identity == "i" || identity == "i-second") {
        r = identity == "i" ? mc_first_moment(sys, z, y, trials, seed, exact)
                            : mc_second_moment(sys, z, y, trials, seed, exact);
    } else if (identity.rfind("ii-j", 0) == 0 || identity.rfind("iii-j", 0) == 0) {
        const bool two = identity[2] == '-';
        const std::string js = identity.substr(two ? 4 : 5);
        if (js != "0" && js != "1" && js != "2") throw InvalidArgument("--identity: j must be 0, 1 or 2");
        LambdaInstance inst;
        inst.y = y;
        inst.z = z;
        inst.H = a.get<double>("H", 3.0);
        const auto M = a.get<double>("M", 4.6);
        inst.K = a.get<int>("K", 3);
        const auto xi = a.get<double>("xi", 1.1);
        if (!(inst.H > 1) || !(xi > 1)) throw InvalidArgument("--H and --xi must exceed 1");
        const auto hm_def = std::min<uint64_t>(static_cast<uint64_t>(std::floor(std::pow(inst.H, M))), z);
        inst.hm = a.get<uint64_t>("hm", hm_def);
        const auto q_lo = a.get<uint64_t>("q_lo", static_cast<uint64_t>(std::floor(y / (xi * inst.H))));
        const auto q_hi = a.get<uint64_t>("q_hi", static_cast<uint64_t>(std::floor(y / inst.H)));
        for (uint64_t q : primes_in(std::max(q_lo, z), q_hi))
            if (sys.class_count(q) > 0) inst.Q.push_back(q);
        instance.update({{"H", inst.H}, {"K", inst.K}, {"hm", inst.hm}, {"Q", inst.Q}});
        r = mc_lambda_moments(sys, inst, two ? LambdaIdentity::II : LambdaIdentity::III, js[0] - '0', trials, seed,
                              exact);
    } else {
        throw InvalidArgument("--identity must be i, i-second, ii-j0..2 or iii-j0..2");
    }
    json out = moment_json(r);
    out["system"] = system_json(sys);
    out["instance"] = instance;
    return out;
}

json cmd_constants(Args& a) {
    const auto rho = a.require<double>("rho");
    const auto tol = a.get<double>("tol", 1e-9);
    const auto d = a.opt<int>("derangement");
    const auto rep = constants_report(rho, tol);
    json out = {{"rho", rep.rho},
                {"c_rho", rep.c_rho},
                {"lower_bound", rep.lower_bound},
                {"delta1_check", rep.delta1_check},
                {"tol", rep.tol},
                {"derangement", nullptr}};
    if (d) {
        const auto q = rho_derangement(static_cast<unsigned>(*d));
        out["derangement"] = {{"d", *d}, {"rho_d", q.get_str()}, {"value", q.get_d()}};
    }
    return out;
}

json cmd_composite_runs(Args& a, uint64_t seed) {
    const auto poly = a.require<std::string>("poly");
    const auto X = a.require<uint64_t>("X");
    const auto constructed = a.get<bool>("constructed", false);
    const auto f = Polynomial::parse(poly);
    const auto bf = composite_run_bruteforce(f, X);
    json out = {{"polynomial", f.to_string()},
                {"X", X},
                {"bruteforce",
                 {{"start", bf.start}, {"length", bf.length}, {"probabilistic_tests", bf.probabilistic_tests}}},
                {"constructed", nullptr}};
    if (constructed) {
        const auto r = composite_run_constructed(f, X, seed);
        out["constructed"] = {{"x", r.x},
                              {"period", r.period.get_str()},
                              {"start", r.start},
                              {"length", r.length},
                              {"baseline_length", r.baseline_length},
                              {"degenerate", r.degenerate},
                              {"degenerate_prime", r.degenerate ? json(r.degenerate_prime) : json(nullptr)},
                              {"probabilistic_tests", r.probabilistic_tests},
                              {"within_bruteforce_max", r.length <= bf.length},
                              {"warnings", r.warnings}};
    }
    return out;
}

json cmd_coprime(Args& a, uint64_t seed) {
    const auto poly = a.require<std::string>("poly");
    const auto f = Polynomial::parse(poly);
    const auto constructed = a.get<bool>("constructed", false);
    json out = {{"polynomial", f.to_string()}, {"search", nullptr}, {"constructed", nullptr}};
    const auto k = a.opt<uint64_t>("k");
    const auto bound = a.get<uint64_t>("bound", 10000);
    if (k) {
        const auto w = coprimality_witness(f, *k, bound);
        out["search"] = {{"k", *k}, {"bound", bound}, {"n", w ? json(*w) : json(nullptr)}};
    } else if (!constructed) {
        throw InvalidArgument("missing required parameter --k (or pass --constructed)");
    }
    const auto xs = a.get<std::vector<uint64_t>>("xs", {50, 100});
    const auto seeds = a.get<uint64_t>("seeds", 4);
    if (constructed) {
        const auto w = coprimality_from_construction(f, xs, seed, seeds);
        out["constructed"] = {{"found", w.found},
                              {"n", w.found ? json(w.n.get_str()) : json(nullptr)},
                              {"k", w.k},
                              {"x", w.x},
                              {"seed", w.seed},
                              {"gap", w.gap},
                              {"target_k", w.target_k}};
    }
    return out;
}

}  // namespace

void quantize(json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            j = nullptr;
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, v);
        j = std::strtod(buf, nullptr);
    } else if (j.is_structured()) {
        for (auto& v : j) quantize(v);
    }
}

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (const auto& [k, _] : command_keys()) out.push_back(k);
    return out;
}

json run_command(const json& config) {
    if (!config.is_object()) throw InvalidArgument("run config must be a JSON object");
    if (!config.contains("command") || !config["command"].is_string()) throw InvalidArgument("missing command");
    const auto command = config["command"].get<std::string>();
    const auto it = command_keys().find(command);
    if (it == command_keys().end()) throw InvalidArgument("unknown command \"" + command + "\"");
    std::set<std::string> allowed(it->second.begin(), it->second.end());
    allowed.insert({"command", "seed", "threads", "format"});
    for (const auto& [k, _] : config.items()) {
        if (!allowed.count(k)) throw InvalidArgument("unknown parameter \"" + k + "\" for " + command);
    }

    json resolved = {{"command", command}};
    Args a(config, resolved);
    const auto seed = a.get<uint64_t>("seed", kDefaultSeed);
    const auto threads = a.get<uint64_t>("threads", 0);
    const auto format = a.get<std::string>("format", "json");
    if (format != "json" && format != "csv") throw InvalidArgument("--format must be json or csv");
    set_thread_cap(static_cast<unsigned>(threads));

    json body;
    if (command == "system-info") body = cmd_system_info(a);
    else if (command == "gaps") body = cmd_gaps(a);
    else if (command == "construct") body = cmd_construct(a, seed);
    else if (command == "cover-demo") body = cmd_cover_demo(a, seed);
    else if (command == "moments") body = cmd_moments(a, seed);
    else if (command == "constants") body = cmd_constants(a);
    else if (command == "composite-runs") body = cmd_composite_runs(a, seed);
    else body = cmd_coprime(a, seed);

    json out = {{"command", command}, {"version", kVersion}, {"config", resolved}};
    out.update(body);
    quantize(out);
    return out;
}

}  // namespace sievegap
