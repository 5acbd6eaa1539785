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

#include "cachescope/classifier.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachescope {

void FilterThresholds::validate() const {
    for (double v : {global_load_gate, global_store_gate, instr_access_floor, instr_miss_floor,
                     line_set_miss_floor, window_ratio, checked_share}) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("thresholds must be in [0, 1]");
    }
    if (miss_penalty < 1.0) throw std::invalid_argument("miss penalty must be >= 1");
}

const char* issue_type_name(IssueType t) {
    switch (t) {
        case IssueType::TrueSharing: return "true sharing";
        case IssueType::AppFalseSharing: return "false sharing (application)";
        case IssueType::AllocFalseSharing: return "false sharing (allocator)";
        case IssueType::AppConflict: return "conflict miss (application)";
        case IssueType::AllocConflict: return "conflict miss (allocator)";
        case IssueType::AppCapacity: return "capacity miss (application)";
    }
    return "?";
}

const char* issue_kind_label(IssueType t) {
    switch (t) {
        case IssueType::TrueSharing: return "true-sharing";
        case IssueType::AppFalseSharing:
        case IssueType::AllocFalseSharing: return "false-sharing";
        case IssueType::AppConflict:
        case IssueType::AllocConflict: return "conflict";
        case IssueType::AppCapacity: return "capacity";
    }
    return "?";
}

const char* issue_origin_label(IssueType t) {
    switch (t) {
        case IssueType::AllocFalseSharing:
        case IssueType::AllocConflict: return "allocator";
        default: return "application";
    }
}

bool global_gate(const SampleTotals& totals, const FilterThresholds& t) {
    const double load_ratio =
        totals.loads ? static_cast<double>(totals.load_misses) / totals.loads : 0.0;
    const double store_ratio =
        totals.stores ? static_cast<double>(totals.store_misses) / totals.stores : 0.0;
    if (totals.accesses() == 0) return false;
    return !(load_ratio < t.global_load_gate && store_ratio < t.global_store_gate);
}

double slowdown_bound(double access_ratio, double penalty) {
    return access_ratio * penalty + (1.0 - access_ratio);
}

namespace {

std::vector<uint64_t> sorted_ips(const std::unordered_map<uint64_t, uint64_t>& ip_misses) {
    std::vector<std::pair<uint64_t, uint64_t>> v(ip_misses.begin(), ip_misses.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<uint64_t> out;
    out.reserve(v.size());
    for (const auto& [ip, n] : v) out.push_back(ip);
    return out;
}

double access_ratio_of(const std::vector<uint64_t>& ips, const InstructionStore& instrs,
                       const SampleTotals& totals) {
    if (totals.accesses() == 0) return 0.0;
    uint64_t acc = 0;
    for (uint64_t ip : ips) {
        if (const auto* st = instrs.find(ip)) acc += st->sampled_accesses();
    }
    return static_cast<double>(acc) / static_cast<double>(totals.accesses());
}

void sort_objects(std::vector<ObjectInfo>& objs) {
    std::sort(objs.begin(), objs.end(), [](const ObjectInfo& a, const ObjectInfo& b) {
        if (a.callsite != b.callsite) return a.callsite < b.callsite;
        if (a.size != b.size) return a.size < b.size;
        return a.alloc_tid < b.alloc_tid;
    });
    objs.erase(std::unique(objs.begin(), objs.end()), objs.end());
}

}  // namespace

LineClassification classify_lines(const MissStore& misses, const InstructionStore& instrs,
                                  const ObjectStore& objects, const GlobalRegions& globals,
                                  const SampleTotals& totals, const FilterThresholds& t,
                                  const CacheConfig& cfg) {
    LineClassification out;
    const uint64_t total = misses.total();
    if (total == 0) return out;
    const double floor = t.line_set_miss_floor * static_cast<double>(total);

    // Hot lines per set, for the pileup exclusion: several hot lines stacked
    // on one significant set is a conflict signature, not coherence.
    std::unordered_map<uint32_t, uint32_t> hot_lines_per_set;
    std::vector<uint64_t> hot;
    for (const auto& [line, entry] : misses.lines()) {
        if (static_cast<double>(entry.misses) >= floor) {
            hot.push_back(line);
            ++hot_lines_per_set[cfg.set_of(line)];
        }
    }
    std::sort(hot.begin(), hot.end());

    // ip -> misses accumulated on reported lines, for the checked mark.
    std::unordered_map<uint64_t, uint64_t> reported_ip_misses;

    for (uint64_t line : hot) {
        const LineMissEntry& entry = misses.lines().at(line);
        const uint32_t set = cfg.set_of(line);
        if (static_cast<double>(misses.set_misses()[set]) >= floor && hot_lines_per_set[set] >= 2)
            continue;

        bool same_word = false;
        std::vector<uint32_t> line_tids;
        for (const auto& w : entry.words) {
            auto tids = w.all_tids();
            if (tids.size() >= 2 || w.loads.saturated || w.stores.saturated) same_word = true;
            for (uint32_t tid : tids) {
                auto it = std::lower_bound(line_tids.begin(), line_tids.end(), tid);
                if (it == line_tids.end() || *it != tid) line_tids.insert(it, tid);
            }
        }

        IssueReport rep;
        if (same_word) {
            rep.type = IssueType::TrueSharing;
        } else if (line_tids.size() >= 2) {
            auto objs = objects.objects_overlapping(line, line + cfg.line_size);
            std::vector<uint32_t> alloc_tids;
            for (const auto& o : objs) alloc_tids.push_back(o.alloc_tid);
            std::sort(alloc_tids.begin(), alloc_tids.end());
            alloc_tids.erase(std::unique(alloc_tids.begin(), alloc_tids.end()),
                             alloc_tids.end());
            rep.type = (objs.size() >= 2 && alloc_tids.size() >= 2)
                           ? IssueType::AllocFalseSharing
                           : IssueType::AppFalseSharing;
        } else {
            continue;  // single thread, not coherence
        }

        rep.line_addr = line;
        rep.set_index = set;
        rep.ips = sorted_ips(entry.ip_misses);
        for (const auto& o : objects.objects_overlapping(line, line + cfg.line_size))
            rep.objects.push_back(ObjectInfo{o.callsite, o.size, o.alloc_tid});
        sort_objects(rep.objects);
        for (uint64_t off = 0; off < cfg.line_size; off += CacheConfig::kWordSize) {
            if (const auto* g = globals.lookup(line + off)) {
                if (rep.regions.empty() || rep.regions.back() != g->name)
                    rep.regions.push_back(g->name);
            }
        }
        rep.miss_ratio = static_cast<double>(entry.misses) / static_cast<double>(total);
        rep.access_ratio = access_ratio_of(rep.ips, instrs, totals);
        rep.slowdown_bound = slowdown_bound(rep.access_ratio, t.miss_penalty);
        std::sort(rep.ips.begin(), rep.ips.end());

        for (const auto& [ip, n] : entry.ip_misses) reported_ip_misses[ip] += n;
        out.reports.push_back(std::move(rep));
    }

    for (const auto& [ip, n] : reported_ip_misses) {
        const auto* st = instrs.find(ip);
        if (!st || st->flushed_misses() == 0) continue;
        if (static_cast<double>(n) >=
            t.checked_share * static_cast<double>(st->flushed_misses()))
            out.checked_ips.insert(ip);
    }
    return out;
}

std::vector<IssueReport> classify_instructions(const InstructionStore& instrs,
                                               const std::unordered_set<uint64_t>& checked_ips,
                                               const SampleTotals& totals,
                                               const FilterThresholds& t,
                                               const BreakpointConfig& bp) {
    std::vector<IssueReport> out;
    const uint64_t total_sampled = instrs.total_sampled();
    const uint64_t total_flushed = instrs.total_flushed();
    if (total_flushed == 0) return out;

    std::vector<uint64_t> ips;
    for (const auto& [ip, st] : instrs.stats()) ips.push_back(ip);
    std::sort(ips.begin(), ips.end());

    for (uint64_t ip : ips) {
        const InstructionStats& st = *instrs.find(ip);
        if (checked_ips.count(ip)) continue;
        if (st.flushed_misses() == 0) continue;
        if (static_cast<double>(st.sampled_accesses()) <
            t.instr_access_floor * static_cast<double>(total_sampled))
            continue;
        if (static_cast<double>(st.flushed_misses()) <
            t.instr_miss_floor * static_cast<double>(total_flushed))
            continue;

        IssueReport rep;
        rep.ips = {ip};
        bool conflict = false;
        if (st.pattern && st.pattern->outcome == FineOutcome::SameSetConflict) {
            conflict = true;
            rep.set_index = st.pattern->dominant_set;
        } else if (st.pattern && st.pattern->outcome == FineOutcome::MultiSetCapacity) {
            // capacity
        } else {
            // No conclusive pattern: fall back to the sampled per-set miss
            // histogram, mirroring the breakpoint rule.
            uint64_t best = 0;
            uint32_t best_set = 0;
            for (const auto& [set, n] : st.set_histogram) {
                if (n > best || (n == best && set < best_set)) {
                    best = n;
                    best_set = set;
                }
            }
            if (best >= bp.same_set_run &&
                static_cast<double>(best) >= 0.5 * static_cast<double>(st.flushed_misses())) {
                conflict = true;
                rep.set_index = best_set;
            }
        }

        if (st.pattern) {
            for (const auto& o : st.pattern->objects)
                rep.objects.push_back(ObjectInfo{o.callsite, o.size, o.alloc_tid});
            sort_objects(rep.objects);
        }

        if (conflict) {
            const bool multi_object = st.pattern && st.pattern->distinct_heap_objects() >= 2;
            rep.type = multi_object ? IssueType::AllocConflict : IssueType::AppConflict;
        } else {
            rep.type = IssueType::AppCapacity;
        }

        rep.miss_ratio =
            static_cast<double>(st.flushed_misses()) / static_cast<double>(total_flushed);
        rep.access_ratio = total_sampled == 0
                               ? 0.0
                               : static_cast<double>(st.sampled_accesses()) /
                                     static_cast<double>(total_sampled);
        rep.slowdown_bound = slowdown_bound(rep.access_ratio, t.miss_penalty);
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<IssueReport> summarize_statements(std::vector<IssueReport> reports,
                                              const std::map<uint64_t, std::string>& symbols) {
    if (symbols.empty()) return reports;

    // A report gets a statement only when every ip resolves to one file:line.
    auto statement_of = [&](const IssueReport& r) -> std::string {
        std::string stmt;
        for (uint64_t ip : r.ips) {
            auto it = symbols.find(ip);
            if (it == symbols.end()) return "";
            if (stmt.empty()) stmt = it->second;
            else if (stmt != it->second) return "";
        }
        return stmt;
    };

    std::vector<IssueReport> out;
    std::map<std::pair<int, std::string>, size_t> merged;  // (type, statement) -> index
    for (auto& r : reports) {
        const std::string stmt = statement_of(r);
        if (stmt.empty()) {
            out.push_back(std::move(r));
            continue;
        }
        auto key = std::make_pair(static_cast<int>(r.type), stmt);
        auto it = merged.find(key);
        if (it == merged.end()) {
            r.statement = stmt;
            merged[key] = out.size();
            out.push_back(std::move(r));
            continue;
        }
        IssueReport& dst = out[it->second];
        for (uint64_t ip : r.ips) {
            auto pos = std::lower_bound(dst.ips.begin(), dst.ips.end(), ip);
            if (pos == dst.ips.end() || *pos != ip) dst.ips.insert(pos, ip);
        }
        for (const auto& o : r.objects) dst.objects.push_back(o);
        sort_objects(dst.objects);
        for (const auto& g : r.regions) {
            if (std::find(dst.regions.begin(), dst.regions.end(), g) == dst.regions.end())
                dst.regions.push_back(g);
        }
        dst.miss_ratio += r.miss_ratio;
        dst.access_ratio += r.access_ratio;
    }
    return out;
}

std::vector<IssueReport> classify(const MissStore& misses, const InstructionStore& instrs,
                                  const ObjectStore& objects, const GlobalRegions& globals,
                                  const std::map<uint64_t, std::string>& symbols,
                                  const SampleTotals& totals, const FilterThresholds& t,
                                  const BreakpointConfig& bp, const CacheConfig& cfg) {
    if (!global_gate(totals, t)) return {};

    auto lines = classify_lines(misses, instrs, objects, globals, totals, t, cfg);
    auto instruction_reports =
        classify_instructions(instrs, lines.checked_ips, totals, t, bp);

    std::vector<IssueReport> all = std::move(lines.reports);
    all.insert(all.end(), std::make_move_iterator(instruction_reports.begin()),
               std::make_move_iterator(instruction_reports.end()));
    all = summarize_statements(std::move(all), symbols);

    for (auto& r : all) r.slowdown_bound = slowdown_bound(r.access_ratio, t.miss_penalty);

    std::sort(all.begin(), all.end(), [](const IssueReport& a, const IssueReport& b) {
        if (a.miss_ratio != b.miss_ratio) return a.miss_ratio > b.miss_ratio;
        const uint64_t ia = a.ips.empty() ? UINT64_MAX : a.ips.front();
        const uint64_t ib = b.ips.empty() ? UINT64_MAX : b.ips.front();
        return ia < ib;
    });
    return all;
}

}  // namespace cachescope
