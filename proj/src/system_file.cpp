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

#include "system_file.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "primes.hpp"

namespace sievegap {

namespace {

// drops commas that directly precede } or ], outside strings
std::string strip_trailing_commas(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out += c;
            if (c == '\\' && i + 1 < text.size()) out += text[++i];
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
        }
        out += c;
    }
    return out;
}

mpz_class to_mpz(const nlohmann::json& v) {
    if (v.is_number_integer()) return mpz_class(v.dump());
    if (v.is_string()) {
        mpz_class out;
        if (out.set_str(v.get<std::string>(), 10) != 0) throw InvalidArgument("bad integer: " + v.get<std::string>());
        return out;
    }
    throw InvalidArgument("binomial coefficients must be integers or decimal strings");
}

}  // namespace

SievingSystem parse_system_definition(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(strip_trailing_commas(text), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("system file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("system file: expected an object with \"kind\"");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "eratosthenes") return SievingSystem::eratosthenes();
    if (kind == "twin") return SievingSystem::twin();
    if (kind == "polynomial") {
        Polynomial f;
        if (j.contains("binomial_coeffs")) {
            std::vector<mpz_class> c;
            for (const auto& v : j["binomial_coeffs"]) c.push_back(to_mpz(v));
            f = Polynomial::from_binomial(std::move(c));
        } else if (j.contains("poly")) {
            f = Polynomial::parse(j["poly"].get<std::string>());
        } else {
            throw InvalidArgument("system file: polynomial needs \"binomial_coeffs\" or \"poly\"");
        }
        const auto rule = j.value("small_primes", std::string("all"));
        if (rule == "all") return SievingSystem::polynomial(f, SmallPrimeRule::AllPrimes);
        if (rule == "empty_up_to_degree") return SievingSystem::polynomial(f, SmallPrimeRule::EmptyUpToDegree);
        throw InvalidArgument("system file: small_primes must be \"all\" or \"empty_up_to_degree\"");
    }
    if (kind == "table") {
        std::map<uint64_t, std::vector<uint64_t>> entries;
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 2) throw InvalidArgument("system file: entries are [p, [r...]] pairs");
            const auto p = e[0].get<uint64_t>();
            if (!is_prime_u64(p)) throw InvalidArgument("system file: " + std::to_string(p) + " is not prime");
            if (entries.count(p)) throw InvalidArgument("system file: prime " + std::to_string(p) + " listed twice");
            entries[p] = e[1].get<std::vector<uint64_t>>();
        }
        return SievingSystem::table(entries);
    }
    throw InvalidArgument("system file: unknown kind \"" + kind + "\"");
}

SievingSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open system file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system_definition(ss.str());
}

SievingSystem resolve_system(const std::string& spec) {
    if (spec == "eratosthenes" || spec == "twin" || spec.rfind("poly:", 0) == 0 || spec.rfind("poly-strict:", 0) == 0) {
        return SievingSystem::builtin(spec);
    }
    if (std::filesystem::exists(spec)) return load_system_file(spec);
    throw InvalidArgument("unknown system \"" + spec + "\" (not a builtin name or an existing file)");
}

}  // namespace sievegap
