// Copyright 2026 The cachescope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cachescope/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace cachescope {

void RunConfig::validate() const {
    cache.validate();
    sampler.validate();
    bp.validate();
    filters.validate();
    if (window_capacity < 1) throw std::invalid_argument("window must be >= 1");
}

namespace {

uint64_t to_u64(const std::string& v, const std::string& key) {
    size_t pos = 0;
    uint64_t out = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument("bad integer for " + key + ": " + v);
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("bad number for " + key + ": " + v);
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"line_size", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.cache.line_size = static_cast<uint32_t>(to_u64(v, k)); }},
        {"sets", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.cache.num_sets = static_cast<uint32_t>(to_u64(v, k)); }},
        {"assoc", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.cache.associativity = static_cast<uint32_t>(to_u64(v, k)); }},
        {"cores", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.cache.num_cores = static_cast<uint32_t>(to_u64(v, k)); }},
        {"load_period", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.sampler.load_period = to_u64(v, k); }},
        {"store_period", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.sampler.store_period = to_u64(v, k); }},
        {"period_jitter", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.sampler.jitter = to_double(v, k); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.sampler.seed = to_u64(v, k); }},
        {"window", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.window_capacity = static_cast<uint32_t>(to_u64(v, k)); }},
        {"window_ratio", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.window_ratio = to_double(v, k); }},
        {"k_consec", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bp.consec_misses = static_cast<uint32_t>(to_u64(v, k)); }},
        {"t_set", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bp.set_total = static_cast<uint32_t>(to_u64(v, k)); }},
        {"bp_max_accesses", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bp.max_accesses = static_cast<uint32_t>(to_u64(v, k)); }},
        {"bp_same_set_run", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bp.same_set_run = static_cast<uint32_t>(to_u64(v, k)); }},
        {"expiry_events", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bp.expiry_events = to_u64(v, k); }},
        {"global_load_gate", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.global_load_gate = to_double(v, k); }},
        {"global_store_gate", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.global_store_gate = to_double(v, k); }},
        {"instr_access_floor", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.instr_access_floor = to_double(v, k); }},
        {"instr_miss_floor", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.instr_miss_floor = to_double(v, k); }},
        {"line_set_miss_floor", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.line_set_miss_floor = to_double(v, k); }},
        {"checked_share", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.checked_share = to_double(v, k); }},
        {"miss_penalty", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.filters.miss_penalty = to_double(v, k); }},
        {"skip_min_samples", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.skip.min_samples = to_u64(v, k); }},
        {"skip_fraction", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.skip.fraction = to_double(v, k); }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> v;
        for (const auto& [k, fn] : setters()) v.push_back(k);
        return v;
    }();
    return keys;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("unknown config key: " + key);
    it->second(cfg, key, value);
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    KeyValues out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        std::string body = line.substr(first, last - first + 1);
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return out;
}

KeyValues environment_overrides() {
    KeyValues out;
    for (const auto& key : config_keys()) {
        std::string env = "CACHESCOPE_" + key;
        std::transform(env.begin(), env.end(), env.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (const char* v = std::getenv(env.c_str())) out.emplace_back(key, v);
    }
    return out;
}

RunConfig make_run_config(const std::string& config_file, const KeyValues& flag_overrides) {
    RunConfig cfg;
    if (!config_file.empty()) {
        for (const auto& [k, v] : parse_config_file(config_file)) apply_key(cfg, k, v);
    }
    for (const auto& [k, v] : environment_overrides()) apply_key(cfg, k, v);
    for (const auto& [k, v] : flag_overrides) apply_key(cfg, k, v);
    cfg.validate();
    return cfg;
}

}  // namespace cachescope
