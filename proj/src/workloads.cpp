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

#include "cachescope/workloads.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cachescope {

namespace {

constexpr uint64_t kHeapBase = 0x10000000;
constexpr uint64_t kMinorHeapBase = 0x20000000;
constexpr uint64_t kColdBase = 0x30000000;
constexpr uint64_t kGlobalBase = 0x40000000;

// Sequenced event emission.
struct Emitter {
    const EventSink& sink;
    uint64_t seq = 0;

    void access(uint32_t tid, uint64_t ip, uint64_t addr, AccessKind kind) {
        sink(AccessEvent{++seq, tid, ip, addr, kind});
    }
    void alloc(uint32_t tid, uint64_t callsite, uint64_t addr, uint64_t size) {
        sink(AllocEvent{++seq, tid, callsite, addr, size});
    }
};

// Round-robin thread order with occasional seed-driven swaps of the two
// leading turns.
struct TurnOrder {
    explicit TurnOrder(uint32_t threads, uint64_t seed)
        : order(threads), rng(mix64(seed ^ 0x7475726e)) {
        for (uint32_t t = 0; t < threads; ++t) order[t] = t;
    }

    const std::vector<uint32_t>& next() {
        if (order.size() > 1 && uniform_in(rng, 0, 9) == 0)
            std::swap(order[0], order[1]);
        return order;
    }

    std::vector<uint32_t> order;
    std::mt19937_64 rng;
};

std::string join_hex(const std::vector<uint64_t>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += to_hex(v[i]);
    }
    return out;
}

std::vector<uint64_t> split_hex(const std::string& s) {
    std::vector<uint64_t> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoull(tok, nullptr, 0));
    return out;
}

void embed_ground_truth(TraceHeader& header, const GroundTruth& gt) {
    header.ground_truth = {
        {"id", gt.id},
        {"kind", gt.expected_kind},
        {"origin", gt.expected_origin},
        {"ips", join_hex(gt.ips)},
        {"callsites", join_hex(gt.callsites)},
        {"warmup_accesses", std::to_string(gt.warmup_accesses)},
        {"expect_report", gt.expect_report ? "1" : "0"},
    };
}

}  // namespace

const char* workload_kind_name(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::FalseSharing: return "false-sharing";
        case WorkloadKind::TrueSharing: return "true-sharing";
        case WorkloadKind::ConflictStride: return "conflict-stride";
        case WorkloadKind::CapacityLoops: return "capacity";
        case WorkloadKind::AllocFalseSharing: return "alloc-false-sharing";
        case WorkloadKind::AllocConflict: return "alloc-conflict";
        case WorkloadKind::Baseline: return "baseline";
        case WorkloadKind::MinorIssue: return "minor-issue";
    }
    return "?";
}

std::optional<WorkloadKind> workload_kind_from(const std::string& name) {
    for (WorkloadKind k :
         {WorkloadKind::FalseSharing, WorkloadKind::TrueSharing, WorkloadKind::ConflictStride,
          WorkloadKind::CapacityLoops, WorkloadKind::AllocFalseSharing,
          WorkloadKind::AllocConflict, WorkloadKind::Baseline, WorkloadKind::MinorIssue}) {
        if (name == workload_kind_name(k)) return k;
    }
    return std::nullopt;
}

GroundTruth parse_ground_truth(const TraceHeader& header) {
    GroundTruth gt;
    for (const auto& [k, v] : header.ground_truth) {
        if (k == "id") gt.id = v;
        else if (k == "kind") gt.expected_kind = v;
        else if (k == "origin") gt.expected_origin = v;
        else if (k == "ips") gt.ips = split_hex(v);
        else if (k == "callsites") gt.callsites = split_hex(v);
        else if (k == "warmup_accesses") gt.warmup_accesses = std::stoull(v);
        else if (k == "expect_report") gt.expect_report = v == "1";
    }
    return gt;
}

Workload build_workload(const WorkloadSpec& spec, const CacheConfig& cfg) {
    cfg.validate();
    if (spec.scale < 1) throw std::invalid_argument("scale must be >= 1");

    Workload w;
    w.header.cache = cfg;
    w.gt.id = std::string(workload_kind_name(spec.kind)) + "-s" + std::to_string(spec.seed);
    const uint64_t seed = spec.seed;
    const uint64_t set_stride = static_cast<uint64_t>(cfg.num_sets) * cfg.line_size;

    switch (spec.kind) {
        case WorkloadKind::FalseSharing:
        case WorkloadKind::TrueSharing: {
            const bool same_word = spec.kind == WorkloadKind::TrueSharing;
            const uint32_t threads = spec.threads ? spec.threads : 2;
            if (threads < 2) throw std::invalid_argument("sharing workloads need >= 2 threads");
            if (threads > cfg.num_cores) throw std::invalid_argument("threads exceed cores");
            if (!same_word && threads > cfg.words_per_line())
                throw std::invalid_argument("false sharing needs one word per thread");
            const uint64_t iters = spec.iterations ? spec.iterations : 600000;
            const uint64_t ip_load = same_word ? 0x1200 : 0x1100;
            const uint64_t ip_store = ip_load + 4;
            const uint64_t callsite = same_word ? 0x2020 : 0x2010;
            const uint64_t obj_size = same_word ? 16 : cfg.line_size - 12;
            const char* file = same_word ? "ts_worker.c:61" : "fs_worker.c:84";

            w.header.symbols[ip_load] = file;
            w.header.symbols[ip_store] = file;
            w.gt.expected_kind = same_word ? "true-sharing" : "false-sharing";
            w.gt.expected_origin = "application";
            w.gt.ips = {ip_load, ip_store};
            w.gt.callsites = {callsite};
            w.gt.warmup_accesses = 2ull * threads;

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                em.alloc(0, callsite, kHeapBase, obj_size);
                TurnOrder turns(threads, seed);
                const uint32_t word_step = cfg.words_per_line() / threads;
                for (uint64_t i = 0; i < iters; ++i) {
                    for (uint32_t t : turns.next()) {
                        const uint64_t addr =
                            same_word ? kHeapBase
                                      : kHeapBase + static_cast<uint64_t>(t) * word_step *
                                                        CacheConfig::kWordSize;
                        em.access(t, ip_load, addr, AccessKind::Load);
                        em.access(t, ip_store, addr, AccessKind::Store);
                    }
                }
            };
            break;
        }

        case WorkloadKind::ConflictStride: {
            const uint32_t threads = spec.threads ? spec.threads : 1;
            if (threads != 1) throw std::invalid_argument("conflict-stride is single-threaded");
            const uint32_t lines = spec.stride_lines ? spec.stride_lines : cfg.associativity + 1;
            if (lines <= cfg.associativity)
                throw std::invalid_argument(
                    "conflict stride needs more distinct lines (" + std::to_string(lines) +
                    ") than the associativity (" + std::to_string(cfg.associativity) + ")");
            const uint64_t rotations = spec.iterations ? spec.iterations : 35;
            const uint32_t repeats = 20;
            const uint64_t ip = 0x1300;
            const uint64_t callsite = 0x2030;

            w.header.symbols[ip] = "stride_sweep.c:262";
            w.gt.expected_kind = "conflict";
            w.gt.expected_origin = "application";
            w.gt.ips = {ip};
            w.gt.callsites = {callsite};
            w.gt.warmup_accesses =
                static_cast<uint64_t>(cfg.num_sets) * repeats * lines;  // one rotation

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                em.alloc(0, callsite, kHeapBase, static_cast<uint64_t>(lines) * set_stride);
                for (uint64_t rot = 0; rot < rotations; ++rot) {
                    for (uint32_t s = 0; s < cfg.num_sets; ++s) {
                        for (uint32_t r = 0; r < repeats; ++r) {
                            for (uint32_t l = 0; l < lines; ++l) {
                                em.access(0, ip,
                                          kHeapBase + static_cast<uint64_t>(l) * set_stride +
                                              static_cast<uint64_t>(s) * cfg.line_size,
                                          AccessKind::Load);
                            }
                        }
                    }
                }
            };
            break;
        }

        case WorkloadKind::CapacityLoops: {
            const uint32_t threads = spec.threads ? spec.threads : 1;
            if (threads != 1) throw std::invalid_argument("capacity loops are single-threaded");
            const uint64_t passes = spec.iterations ? spec.iterations : 72;
            const uint64_t array_bytes = static_cast<uint64_t>(spec.scale) * cfg.capacity_bytes();
            const uint64_t elems = array_bytes / 4;
            const uint64_t alpha = kHeapBase;
            const uint64_t beta = kHeapBase + array_bytes + 4096;
            const uint64_t ip_a = 0x1400, ip_b = 0x1404;

            w.header.symbols[ip_a] = "cap_loops.c:239";
            w.header.symbols[ip_b] = "cap_loops.c:243";
            w.gt.expected_kind = "capacity";
            w.gt.expected_origin = "application";
            w.gt.ips = {ip_a, ip_b};
            w.gt.callsites = {0x2041, 0x2042};
            w.gt.warmup_accesses = 2 * elems;  // first pass over both arrays

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                em.alloc(0, 0x2041, alpha, array_bytes);
                em.alloc(0, 0x2042, beta, array_bytes);
                for (uint64_t p = 0; p < passes; ++p) {
                    for (uint64_t i = 0; i < elems; ++i)
                        em.access(0, ip_a, alpha + 4 * i, AccessKind::Load);
                    for (uint64_t i = 0; i < elems; ++i)
                        em.access(0, ip_b, beta + 4 * i, AccessKind::Load);
                }
            };
            break;
        }

        case WorkloadKind::AllocFalseSharing: {
            const uint32_t threads = spec.threads ? spec.threads : 2;
            if (threads < 2) throw std::invalid_argument("sharing workloads need >= 2 threads");
            if (threads > cfg.num_cores) throw std::invalid_argument("threads exceed cores");
            const uint32_t obj_size = spec.object_size ? spec.object_size
                                                       : cfg.line_size / threads;
            if (static_cast<uint64_t>(obj_size) * threads > cfg.line_size)
                throw std::invalid_argument(
                    "objects do not fit in one line: " + std::to_string(threads) + " x " +
                    std::to_string(obj_size) + " > " + std::to_string(cfg.line_size));
            if (obj_size < CacheConfig::kWordSize)
                throw std::invalid_argument("object size below word size");
            const uint64_t iters = spec.iterations ? spec.iterations : 600000;
            const uint64_t ip_load = 0x1500, ip_store = 0x1504;

            w.header.symbols[ip_load] = "scratch_worker.c:84";
            w.header.symbols[ip_store] = "scratch_worker.c:84";
            w.gt.expected_kind = "false-sharing";
            w.gt.expected_origin = "allocator";
            w.gt.ips = {ip_load, ip_store};
            for (uint32_t t = 0; t < threads; ++t) w.gt.callsites.push_back(0x2050 + t);
            w.gt.warmup_accesses = 2ull * threads;

            w.emit = [=, callsites = w.gt.callsites](const EventSink& sink) {
                Emitter em{sink};
                for (uint32_t t = 0; t < threads; ++t)
                    em.alloc(t, callsites[t], kHeapBase + static_cast<uint64_t>(t) * obj_size,
                             obj_size);
                TurnOrder turns(threads, seed);
                for (uint64_t i = 0; i < iters; ++i) {
                    for (uint32_t t : turns.next()) {
                        const uint64_t addr = kHeapBase + static_cast<uint64_t>(t) * obj_size;
                        em.access(t, ip_load, addr, AccessKind::Load);
                        em.access(t, ip_store, addr, AccessKind::Store);
                    }
                }
            };
            break;
        }

        case WorkloadKind::AllocConflict: {
            const uint32_t threads = spec.threads ? spec.threads : 1;
            if (threads != 1) throw std::invalid_argument("alloc-conflict is single-threaded");
            const uint32_t count = spec.stride_lines ? spec.stride_lines : 40;
            if (count <= cfg.associativity)
                throw std::invalid_argument(
                    "conflict needs more objects (" + std::to_string(count) +
                    ") on the set than the associativity (" +
                    std::to_string(cfg.associativity) + ")");
            const uint32_t obj_size = spec.object_size ? spec.object_size : 48;
            if (obj_size > cfg.line_size)
                throw std::invalid_argument("objects must fit in one line");
            const uint64_t sweeps = spec.iterations ? spec.iterations : 20000;
            const uint64_t ip = 0x1600;

            w.header.symbols[ip] = "rt_render.c:130";
            w.gt.expected_kind = "conflict";
            w.gt.expected_origin = "allocator";
            w.gt.ips = {ip};
            w.gt.callsites = {0x2060, 0x2061};
            w.gt.warmup_accesses = count;  // first sweep

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                for (uint32_t i = 0; i < count; ++i)
                    em.alloc(0, 0x2060 + (i % 2), kHeapBase + static_cast<uint64_t>(i) * set_stride,
                             obj_size);
                for (uint64_t rep = 0; rep < sweeps; ++rep) {
                    for (uint32_t i = 0; i < count; ++i)
                        em.access(0, ip, kHeapBase + static_cast<uint64_t>(i) * set_stride,
                                  AccessKind::Load);
                }
            };
            break;
        }

        case WorkloadKind::Baseline: {
            const uint32_t threads = spec.threads ? spec.threads : 2;
            if (threads > cfg.num_cores) throw std::invalid_argument("threads exceed cores");
            const uint64_t passes = spec.iterations ? spec.iterations : 25;
            const uint64_t region = 16 * 1024;
            const uint64_t elems = region / 4;

            for (uint32_t t = 0; t < threads; ++t)
                w.header.symbols[0x1700 + 4ull * t] = "base_loop.c:40";
            w.gt.expected_kind = "none";
            w.gt.expected_origin = "none";
            w.gt.expect_report = false;
            w.gt.warmup_accesses = threads * elems;

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                for (uint32_t t = 0; t < threads; ++t)
                    em.alloc(t, 0x2080 + t, kHeapBase + t * 0x100000ull, region);
                TurnOrder turns(threads, seed);
                for (uint64_t p = 0; p < passes; ++p) {
                    for (uint64_t i = 0; i < elems; ++i) {
                        for (uint32_t t : turns.next())
                            em.access(t, 0x1700 + 4ull * t, kHeapBase + t * 0x100000ull + 4 * i,
                                      AccessKind::Load);
                    }
                }
            };
            break;
        }

        case WorkloadKind::MinorIssue: {
            const uint32_t threads = spec.threads ? spec.threads : 1;
            if (threads != 1) throw std::invalid_argument("minor-issue is single-threaded");
            const uint64_t total = spec.iterations ? spec.iterations : 11000000;
            const uint32_t lines = spec.stride_lines ? spec.stride_lines : cfg.associativity + 1;
            if (lines <= cfg.associativity)
                throw std::invalid_argument("minor-issue hot loop must exceed associativity");
            const uint64_t bg_region = 32 * 1024;
            const uint64_t bg_elems = bg_region / 4;
            const uint64_t cold_every = 2000;
            const uint64_t hot_every = 11000;
            const uint64_t ip_cold = 0x1840, ip_hot = 0x1850;
            // Hot stores cycle `lines` cache lines of one set inside one object.
            const uint32_t hot_set = 7 % cfg.num_sets;
            const uint64_t hot_size =
                (lines - 1) * set_stride + static_cast<uint64_t>(hot_set) * cfg.line_size + 8;

            w.header.globals.push_back(GlobalRegion{"bg_table", kGlobalBase, bg_region});
            for (uint32_t i = 0; i < 16; ++i)
                w.header.symbols[0x1800 + 4ull * i] = "minor_bg.c:" + std::to_string(100 + i);
            w.header.symbols[ip_cold] = "minor_bg.c:210";
            w.header.symbols[ip_hot] = "minor_hot.c:52";
            w.gt.expected_kind = "conflict";
            w.gt.expected_origin = "application";
            w.gt.ips = {ip_hot};
            w.gt.callsites = {0x2071};
            w.gt.expect_report = false;  // below the instruction access floor
            w.gt.warmup_accesses = 2 * bg_elems;

            w.emit = [=](const EventSink& sink) {
                Emitter em{sink};
                em.alloc(0, 0x2071, kMinorHeapBase, hot_size);
                uint64_t cold_ptr = kColdBase;
                uint64_t hot_idx = 0;
                const uint64_t ip_span = bg_elems / 16;
                for (uint64_t k = 0; k < total; ++k) {
                    if (k % hot_every == 0) {
                        const uint64_t addr = kMinorHeapBase + (hot_idx % lines) * set_stride +
                                              static_cast<uint64_t>(hot_set) * cfg.line_size;
                        ++hot_idx;
                        em.access(0, ip_hot, addr, AccessKind::Store);
                    } else if (k % cold_every == 0) {
                        em.access(0, ip_cold, cold_ptr, AccessKind::Load);
                        cold_ptr += cfg.line_size;
                    } else {
                        const uint64_t i = k % bg_elems;
                        em.access(0, 0x1800 + 4 * (i / ip_span), kGlobalBase + 4 * i,
                                  AccessKind::Load);
                    }
                }
            };
            break;
        }
    }

    embed_ground_truth(w.header, w.gt);
    return w;
}

}  // namespace cachescope
