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

#include "cachescope/report.hpp"

#include <cstdio>
#include <sstream>

namespace cachescope {

using nlohmann::ordered_json;

ordered_json config_json(const RunConfig& cfg) {
    return ordered_json{
        {"line_size", cfg.cache.line_size},
        {"sets", cfg.cache.num_sets},
        {"assoc", cfg.cache.associativity},
        {"cores", cfg.cache.num_cores},
        {"load_period", cfg.sampler.load_period},
        {"store_period", cfg.sampler.store_period},
        {"period_jitter", cfg.sampler.jitter},
        {"seed", cfg.sampler.seed},
        {"window", cfg.window_capacity},
        {"window_ratio", cfg.filters.window_ratio},
        {"k_consec", cfg.bp.consec_misses},
        {"t_set", cfg.bp.set_total},
        {"bp_max_accesses", cfg.bp.max_accesses},
        {"bp_same_set_run", cfg.bp.same_set_run},
        {"expiry_events", cfg.bp.expiry_events},
        {"global_load_gate", cfg.filters.global_load_gate},
        {"global_store_gate", cfg.filters.global_store_gate},
        {"instr_access_floor", cfg.filters.instr_access_floor},
        {"instr_miss_floor", cfg.filters.instr_miss_floor},
        {"line_set_miss_floor", cfg.filters.line_set_miss_floor},
        {"checked_share", cfg.filters.checked_share},
        {"miss_penalty", cfg.filters.miss_penalty},
        {"skip_min_samples", cfg.skip.min_samples},
        {"skip_fraction", cfg.skip.fraction},
    };
}

namespace {

ordered_json issue_json(const IssueReport& issue) {
    ordered_json j;
    j["type"] = issue_type_name(issue.type);
    j["kind"] = issue_kind_label(issue.type);
    j["origin"] = issue_origin_label(issue.type);
    ordered_json ips = ordered_json::array();
    for (uint64_t ip : issue.ips) ips.push_back(to_hex(ip));
    j["ips"] = std::move(ips);
    j["statement"] = issue.statement;
    if (issue.line_addr) j["line"] = to_hex(*issue.line_addr);
    if (issue.set_index) j["set"] = *issue.set_index;
    ordered_json objs = ordered_json::array();
    for (const auto& o : issue.objects) {
        objs.push_back(ordered_json{{"callsite", to_hex(o.callsite)},
                                    {"size", o.size},
                                    {"alloc_tid", o.alloc_tid}});
    }
    j["objects"] = std::move(objs);
    j["regions"] = issue.regions;
    j["access_ratio"] = issue.access_ratio;
    j["miss_ratio"] = issue.miss_ratio;
    j["slowdown_bound"] = issue.slowdown_bound;
    return j;
}

std::string pct(double v) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return buf;
}

}  // namespace

ordered_json profile_report_json(const ProfileResult& result, const RunConfig& cfg,
                                 const std::string& trace_id) {
    ordered_json j;
    j["tool"] = "cachescope";
    j["trace"] = trace_id;
    j["config"] = config_json(cfg);
    j["totals"] = ordered_json{
        {"events", result.stats.events},
        {"accesses", result.stats.accesses},
        {"sampled_loads", result.totals.loads},
        {"sampled_load_misses", result.totals.load_misses},
        {"sampled_stores", result.totals.stores},
        {"sampled_store_misses", result.totals.store_misses},
        {"flush_batches", result.stats.flush_batches},
        {"flushed_misses", result.stats.flushed_misses},
        {"breakpoint_installs", result.stats.bp.installs},
        {"gate_passed", result.gate_passed},
    };
    ordered_json issues = ordered_json::array();
    for (const auto& issue : result.issues) issues.push_back(issue_json(issue));
    j["issues"] = std::move(issues);
    return j;
}

std::string profile_report_text(const ProfileResult& result, const std::string& trace_id) {
    std::ostringstream out;
    out << "cachescope report for " << trace_id << "\n";
    out << "  sampled: " << result.totals.loads << " loads (" << result.totals.load_misses
        << " misses), " << result.totals.stores << " stores (" << result.totals.store_misses
        << " misses)\n";
    out << "  flushed misses: " << result.stats.flushed_misses << " in "
        << result.stats.flush_batches << " batches\n";
    if (!result.gate_passed) {
        out << "  global miss-ratio gate not met: no significant issues\n";
        return out.str();
    }
    if (result.issues.empty()) {
        out << "  no significant issues\n";
        return out.str();
    }
    out << "  " << result.issues.size() << " issue(s)\n";
    size_t n = 0;
    for (const auto& issue : result.issues) {
        out << "\n#" << ++n << " " << issue_type_name(issue.type) << "\n";
        if (!issue.statement.empty()) out << "   statement: " << issue.statement << "\n";
        out << "   ips:";
        for (uint64_t ip : issue.ips) out << " " << to_hex(ip);
        out << "\n";
        if (issue.line_addr) {
            out << "   cache line: " << to_hex(*issue.line_addr);
            if (issue.set_index) out << " (set " << *issue.set_index << ")";
            out << "\n";
        } else if (issue.set_index) {
            out << "   cache set: " << *issue.set_index << "\n";
        }
        for (const auto& o : issue.objects) {
            out << "   object: callsite " << to_hex(o.callsite) << " size " << o.size
                << " alloc-tid " << o.alloc_tid << "\n";
        }
        for (const auto& g : issue.regions) out << "   global: " << g << "\n";
        out << "   severity: " << pct(issue.miss_ratio) << " of flushed misses, "
            << pct(issue.access_ratio) << " of sampled accesses, slowdown bound "
            << issue.slowdown_bound << "x\n";
    }
    return out.str();
}

ordered_json oracle_report_json(const OracleResult& result) {
    const CoreCounters& t = result.totals;
    auto misses = [&](const std::array<uint64_t, 5>& m) {
        return ordered_json{{"compulsory", m[1]}, {"capacity", m[2]}, {"conflict", m[3]},
                            {"coherence", m[4]}};
    };
    ordered_json j;
    j["tool"] = "cachescope-oracle";
    j["trace"] = result.trace_id;
    j["warmup_accesses"] = result.warmup_accesses;
    j["totals"] = ordered_json{
        {"loads", t.loads},
        {"stores", t.stores},
        {"load_hits", t.load_hits},
        {"store_hits", t.store_hits},
        {"load_misses", misses(t.load_misses)},
        {"store_misses", misses(t.store_misses)},
    };
    j["set_misses"] = t.set_misses;
    ordered_json lines = ordered_json::array();
    for (const auto& [line, count] : result.lines)
        lines.push_back(ordered_json{{"line", to_hex(line)}, {"misses", count}});
    j["lines"] = std::move(lines);
    return j;
}

std::string oracle_report_text(const OracleResult& result) {
    const CoreCounters& t = result.totals;
    std::ostringstream out;
    out << "oracle run for " << result.trace_id << " (warmup " << result.warmup_accesses
        << " accesses)\n";
    out << "  loads:  " << t.loads << " (" << t.load_hits << " hits)\n";
    out << "  stores: " << t.stores << " (" << t.store_hits << " hits)\n";
    for (MissKind k : {MissKind::Compulsory, MissKind::Capacity, MissKind::Conflict,
                       MissKind::Coherence}) {
        out << "  " << miss_kind_name(k) << " misses: " << t.misses(k) << "\n";
    }
    uint64_t max_set = 0, min_set = UINT64_MAX;
    for (uint64_t v : t.set_misses) {
        max_set = std::max(max_set, v);
        min_set = std::min(min_set, v);
    }
    if (!t.set_misses.empty())
        out << "  per-set misses: min " << min_set << " max " << max_set << "\n";
    size_t shown = 0;
    for (const auto& [line, count] : result.lines) {
        if (++shown > 10) break;
        out << "  line " << to_hex(line) << ": " << count << " misses\n";
    }
    return out.str();
}

}  // namespace cachescope
