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

// Command-line front end. Talks to the library only through sievegap.h.
#include <algorithm>
#include <cstdlib>
#include <memory>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sievegap.h"

namespace {

using nlohmann::json;

constexpr uint64_t kDefaultSeed = 20170601ull;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { UInt, Int, Real, Text, Flag, UIntList, RealList };

struct Field {
    std::string key;
    Kind kind;
    std::string raw;
    std::vector<std::string> list;
    bool flag = false;
    CLI::Option* opt = nullptr;
};

// One subcommand: its CLI11 handle and the fields it forwards into the run config.
struct Command {
    CLI::App* app = nullptr;
    std::vector<std::unique_ptr<Field>> fields;

    void add(const std::string& names, const std::string& key, Kind kind, const std::string& help) {
        auto f = std::make_unique<Field>();
        f->key = key;
        f->kind = kind;
        if (kind == Kind::Flag) {
            f->opt = app->add_flag(names, f->flag, help);
        } else if (kind == Kind::UIntList || kind == Kind::RealList) {
            f->opt = app->add_option(names, f->list, help)->delimiter(',');
        } else {
            f->opt = app->add_option(names, f->raw, help);
            if (kind == Kind::UInt) f->opt->check(CLI::NonNegativeNumber);
            if (kind == Kind::Real) f->opt->check(CLI::Number);
        }
        fields.push_back(std::move(f));
    }
};

uint64_t to_u64(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
        const auto v = std::stoull(s, &used, 10);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        // accept integral scientific notation such as 1e6
        try {
            size_t used = 0;
            const double d = std::stod(s, &used);
            if (used == s.size() && d >= 0 && d < 1.8e19 && d == static_cast<double>(static_cast<uint64_t>(d)))
                return static_cast<uint64_t>(d);
        } catch (const std::exception&) {
        }
        throw UsageError(what + ": expected a non-negative integer, got \"" + s + "\"");
    }
}

double to_real(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + ": expected a number, got \"" + s + "\"");
    }
}

json field_value(const Field& f) {
    const std::string what = "--" + f.key;
    switch (f.kind) {
        case Kind::UInt: return to_u64(f.raw, what);
        case Kind::Int: return static_cast<int64_t>(to_real(f.raw, what));
        case Kind::Real: return to_real(f.raw, what);
        case Kind::Text: return f.raw;
        case Kind::Flag: return f.flag;
        case Kind::UIntList: {
            json a = json::array();
            for (const auto& s : f.list) a.push_back(to_u64(s, what));
            return a;
        }
        case Kind::RealList: {
            json a = json::array();
            for (const auto& s : f.list) a.push_back(to_real(s, what));
            return a;
        }
    }
    return nullptr;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    json out = json::object();
    for (auto& [k, v] : j.items()) {
        std::string key = k;
        while (!key.empty() && key[0] == '-') key.erase(0, 1);
        std::replace(key.begin(), key.end(), '-', '_');
        out[key] = v;
    }
    return out;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (v.is_object() && !v.empty()) {
        for (const auto& [k, sub] : v.items()) flatten(sub, prefix.empty() ? k : prefix + "." + k, out);
    } else if (v.is_array() && !v.empty()) {
        for (size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
    } else if (v.is_structured()) {
        out.emplace_back(prefix, "");
    } else {
        out.emplace_back(prefix, csv_cell(v));
    }
}

std::string to_csv(const json& report) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(report, "", cells);
    std::string head, row;
    for (size_t i = 0; i < cells.size(); ++i) {
        head += (i ? "," : "") + csv_cell(json(cells[i].first));
        row += (i ? "," : "") + cells[i].second;
    }
    return head + "\n" + row + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sieving systems: sifted sets, long-gap constructions, covering rounds and moment checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    std::string seed_raw, config_path, format = "json";
    unsigned threads = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "master seed (default 20170601, or $SIEVEGAP_SEED)");
    auto* threads_opt = app.add_option("--threads", threads, "worker cap, 0 = all cores");
    app.add_option("--config", config_path, "JSON file of parameters; flags override it");
    auto* format_opt = app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::unique_ptr<Command>> commands;
    auto make = [&](const std::string& name, const std::string& help) -> Command& {
        commands.push_back(std::make_unique<Command>());
        commands.back()->app = app.add_subcommand(name, help);
        return *commands.back();
    };

    {
        auto& c = make("system-info", "density report for a sieving system");
        c.add("--system,--file", "system", Kind::Text, "builtin name or definition file");
        c.add("--x", "x", Kind::UInt, "sieving cutoff");
        c.add("--drift-ratio", "drift_ratio", Kind::Real, "relative drift flagged as not one-dimensional");
    }
    {
        auto& c = make("gaps", "largest gap of a shifted sifted set in a window");
        c.add("--system", "system", Kind::Text, "builtin name or definition file");
        c.add("--x", "x", Kind::UInt, "sieving cutoff");
        c.add("--window", "window", Kind::Text, "LO..HI");
        c.add("--z", "z", Kind::UInt, "sieve only primes in (z, x]");
        c.add("--shift-file", "shift_file", Kind::Text, "text file of 'p residue' lines");
    }
    {
        auto& c = make("construct", "three-stage construction of a long empty interval");
        c.add("--system", "system", Kind::Text, "builtin name or definition file");
        c.add("--x", "x", Kind::UInt, "sieving cutoff");
        c.add("--delta", "delta", Kind::Real, "exponent in y = x (log x)^delta");
        c.add("--mode", "mode", Kind::Text, "sample | cover");
        c.add("--trials", "trials", Kind::UInt, "independent seeds to try");
        c.add("--force-z", "force_z", Kind::UInt, "override z");
        c.add("--force-scales", "force_scales", Kind::RealList, "comma-separated scales H");
        c.add("--M", "M", Kind::Real, "4 + delta < M <= 5");
        c.add("--K", "K", Kind::Int, "progression length factor");
        c.add("--xi", "xi", Kind::Real, "scale ratio > 1");
        c.add("--shift-out", "shift_out", Kind::Text, "write the best shift here");
    }
    {
        auto& c = make("cover-demo", "covering rounds on the calibrated synthetic family");
        c.add("--vertices", "vertices", Kind::UInt, "number of vertices");
        c.add("--edges", "edges", Kind::UInt, "number of random edges (c2 * vertices)");
        c.add("--c2", "c2", Kind::Real, "vertex degree");
        c.add("--eta", "eta", Kind::Real, "target uncovered fraction");
        c.add("--delta", "delta", Kind::Real, "hypothesis exponent");
        c.add("--beta", "beta", Kind::Real, "override the round ratio");
        c.add("--trials", "trials", Kind::UInt, "independent runs");
    }
    {
        auto& c = make("moments", "Monte Carlo or exact check of a moment identity");
        c.add("--system", "system", Kind::Text, "builtin name or definition file");
        c.add("--identity", "identity", Kind::Text, "i | i-second | ii-j0..2 | iii-j0..2");
        c.add("--trials", "trials", Kind::UInt, "random shifts");
        c.add("--exact", "exact", Kind::Flag, "enumerate every shift mod P(z)");
        c.add("--z", "z", Kind::UInt, "z");
        c.add("--y", "y", Kind::UInt, "interval length");
        c.add("--H", "H", Kind::Real, "scale");
        c.add("--M", "M", Kind::Real, "hm = floor(H^M)");
        c.add("--K", "K", Kind::Int, "progression length factor");
        c.add("--hm", "hm", Kind::UInt, "override hm");
        c.add("--xi", "xi", Kind::Real, "Q = primes in (y/(xi H), y/H]");
        c.add("--q-lo", "q_lo", Kind::UInt, "override the lower end of Q");
        c.add("--q-hi", "q_hi", Kind::UInt, "override the upper end of Q");
    }
    {
        auto& c = make("constants", "the exponent constant C(rho)");
        c.add("--rho", "rho", Kind::Real, "density of primes with a forbidden class");
        c.add("--tol", "tol", Kind::Real, "relative bisection tolerance");
        c.add("--derangement", "derangement", Kind::Int, "also report rho_d for this degree");
    }
    {
        auto& c = make("composite-runs", "longest run of n <= X with f(n) not prime");
        c.add("--poly", "poly", Kind::Text, "polynomial, e.g. n^2+1");
        c.add("--X", "X", Kind::UInt, "upper end");
        c.add("--constructed", "constructed", Kind::Flag, "also build a run from the gap construction");
    }
    {
        auto& c = make("coprime", "windows where every value shares a prime > deg f with another");
        c.add("--poly", "poly", Kind::Text, "polynomial");
        c.add("--k", "k", Kind::UInt, "window length");
        c.add("--bound", "bound", Kind::UInt, "search n in [0, bound]");
        c.add("--constructed", "constructed", Kind::Flag, "derive a window from the gap construction");
        c.add("--xs", "xs", Kind::UIntList, "cutoffs for --constructed");
        c.add("--seeds", "seeds", Kind::UInt, "seeds per cutoff for --constructed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    Command* chosen = nullptr;
    for (auto& c : commands)
        if (c->app->parsed()) chosen = c.get();

    json config = json::object();
    try {
        if (!config_path.empty()) config = load_config(config_path);
        config["command"] = chosen->app->get_name();
        if (*seed_opt) {
            config["seed"] = to_u64(seed_raw, "--seed");
        } else if (!config.contains("seed")) {
            const char* env = std::getenv("SIEVEGAP_SEED");
            config["seed"] = env && *env ? to_u64(env, "SIEVEGAP_SEED") : kDefaultSeed;
        }
        if (*threads_opt || !config.contains("threads")) config["threads"] = threads;
        if (*format_opt || !config.contains("format")) config["format"] = format;
        for (const auto& f : chosen->fields)
            if (f->opt->count() > 0) config[f->key] = field_value(*f);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << chosen->app->help();
        return kExitUsage;
    }

    sg_report* report = nullptr;
    const int rc = sg_run(config.dump().c_str(), &report);
    if (rc != SG_OK) {
        std::cerr << "error: " << sg_last_error() << "\n";
        if (rc == SG_ERR_INVALID_ARGUMENT) {
            std::cerr << chosen->app->help();
            return kExitUsage;
        }
        return kExitDomain;
    }
    const std::string text = sg_report_json(report);
    sg_report_free(report);
    if (config.value("format", std::string("json")) == "csv") {
        std::cout << to_csv(json::parse(text));
    } else {
        std::cout << text << "\n";
    }
    return 0;
}
