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

#include "cachescope/trace.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cachescope {

uint64_t event_seq(const TraceEvent& ev) {
    return std::visit([](const auto& e) { return e.seq; }, ev);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

uint64_t parse_u64(std::string_view s, size_t line_no, const char* what) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw TraceError(line_no, std::string("bad ") + what + " field");
    return v;
}

uint64_t parse_hex(std::string_view s, size_t line_no, const char* what) {
    if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        throw TraceError(line_no, std::string(what) + " must be 0x-prefixed hex");
    return parse_u64(s, line_no, what);
}

// start -> size map overlap probe; returns the colliding span if any.
std::optional<std::pair<uint64_t, uint64_t>> find_overlap(
    const std::map<uint64_t, uint64_t>& live, uint64_t start, uint64_t size) {
    auto it = live.upper_bound(start);
    if (it != live.begin()) {
        auto prev = std::prev(it);
        if (prev->first + prev->second > start) return *prev;
    }
    if (it != live.end() && it->first < start + size) return *it;
    return std::nullopt;
}

}  // namespace

TraceWriter::TraceWriter(std::ostream& out, const TraceHeader& header) : out_(out) {
    header.cache.validate();
    std::map<uint64_t, uint64_t> regions;
    for (const auto& g : header.globals) {
        if (g.size == 0) throw TraceError(0, "global region " + g.name + " has zero size");
        if (find_overlap(regions, g.start, g.size))
            throw TraceError(0, "global region " + g.name + " overlaps another region");
        regions[g.start] = g.size;
    }

    out_ << "CFG line_size=" << header.cache.line_size << " sets=" << header.cache.num_sets
         << " assoc=" << header.cache.associativity << " cores=" << header.cache.num_cores
         << "\n";
    for (const auto& [k, v] : header.ground_truth) out_ << "# GT " << k << "=" << v << "\n";
    for (const auto& g : header.globals)
        out_ << "GLOBAL " << g.name << " " << to_hex(g.start) << " " << to_hex(g.size) << "\n";
    for (const auto& [ip, stmt] : header.symbols) out_ << "SYM " << to_hex(ip) << " " << stmt << "\n";
}

void TraceWriter::write(const TraceEvent& ev) {
    ++line_no_;
    const uint64_t seq = event_seq(ev);
    if (any_event_ && seq <= last_seq_)
        throw TraceError(line_no_, "out-of-order seq " + std::to_string(seq));
    last_seq_ = seq;
    any_event_ = true;

    if (const auto* m = std::get_if<AllocEvent>(&ev)) {
        if (m->size == 0) throw TraceError(line_no_, "zero-size allocation");
        if (auto hit = find_overlap(live_, m->addr, m->size))
            throw TraceError(line_no_, "allocation " + to_hex(m->addr) + "+" +
                                           std::to_string(m->size) + " overlaps live object " +
                                           to_hex(hit->first) + "+" + std::to_string(hit->second));
        live_[m->addr] = m->size;
        out_ << "M " << m->seq << " " << m->tid << " " << m->callsite << " " << to_hex(m->addr)
             << " " << m->size << "\n";
    } else if (const auto* f = std::get_if<FreeEvent>(&ev)) {
        auto it = live_.find(f->addr);
        if (it == live_.end())
            throw TraceError(line_no_, "unmatched free of " + to_hex(f->addr));
        live_.erase(it);
        out_ << "F " << f->seq << " " << f->tid << " " << to_hex(f->addr) << "\n";
    } else {
        const auto& a = std::get<AccessEvent>(ev);
        out_ << "A " << a.seq << " " << a.tid << " " << to_hex(a.ip) << " " << to_hex(a.addr)
             << " " << access_kind_char(a.kind) << "\n";
    }
}

TraceReader::TraceReader(std::istream& in) : in_(in) {
    bool have_cfg = false;
    std::string line;
    while (fetch_line(line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            // Capture "# GT key=value" sidecar entries, skip other comments.
            auto f = split_fields(line);
            if (f.size() >= 3 && f[0] == "#" && f[1] == "GT") {
                std::string_view kv = f[2];
                auto eq = kv.find('=');
                if (eq != std::string_view::npos)
                    header_.ground_truth.emplace_back(std::string(kv.substr(0, eq)),
                                                      std::string(kv.substr(eq + 1)));
            }
            continue;
        }
        auto f = split_fields(line);
        if (f.empty()) continue;
        if (f[0] == "CFG") {
            if (have_cfg) throw TraceError(line_no_, "duplicate CFG line");
            for (size_t i = 1; i < f.size(); ++i) {
                auto eq = f[i].find('=');
                if (eq == std::string_view::npos)
                    throw TraceError(line_no_, "bad CFG field");
                auto key = f[i].substr(0, eq);
                uint64_t val = parse_u64(f[i].substr(eq + 1), line_no_, "CFG value");
                if (key == "line_size") header_.cache.line_size = static_cast<uint32_t>(val);
                else if (key == "sets") header_.cache.num_sets = static_cast<uint32_t>(val);
                else if (key == "assoc") header_.cache.associativity = static_cast<uint32_t>(val);
                else if (key == "cores") header_.cache.num_cores = static_cast<uint32_t>(val);
                else throw TraceError(line_no_, "unknown CFG key " + std::string(key));
            }
            try {
                header_.cache.validate();
            } catch (const std::invalid_argument& e) {
                throw TraceError(line_no_, e.what());
            }
            have_cfg = true;
        } else if (f[0] == "GLOBAL") {
            if (f.size() != 4) throw TraceError(line_no_, "GLOBAL needs name, start, size");
            GlobalRegion g{std::string(f[1]), parse_hex(f[2], line_no_, "start"),
                           parse_hex(f[3], line_no_, "size")};
            for (const auto& prev : header_.globals) {
                if (g.start < prev.start + prev.size && prev.start < g.start + g.size)
                    throw TraceError(line_no_, "global region " + g.name + " overlaps " + prev.name);
            }
            header_.globals.push_back(std::move(g));
        } else if (f[0] == "SYM") {
            if (f.size() != 3) throw TraceError(line_no_, "SYM needs ip and file:line");
            uint64_t ip = parse_hex(f[1], line_no_, "ip");
            if (header_.symbols.count(ip))
                throw TraceError(line_no_, "duplicate SYM for " + to_hex(ip));
            header_.symbols[ip] = std::string(f[2]);
        } else {
            // First body line; stash it for next().
            pending_ = line;
            break;
        }
    }
    if (!have_cfg) throw TraceError(line_no_, "missing CFG header line");
}

bool TraceReader::fetch_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no_;
    return true;
}

std::optional<TraceEvent> TraceReader::next() {
    std::string line;
    for (;;) {
        if (pending_) {
            line = std::move(*pending_);
            pending_.reset();
        } else if (!fetch_line(line)) {
            return std::nullopt;
        }
        if (line.empty() || line[0] == '#') continue;
        TraceEvent ev = parse_event(line);
        const uint64_t seq = event_seq(ev);
        if (any_event_ && seq <= last_seq_)
            throw TraceError(line_no_, "non-increasing seq " + std::to_string(seq));
        last_seq_ = seq;
        any_event_ = true;
        return ev;
    }
}

TraceEvent TraceReader::parse_event(const std::string& line) {
    auto f = split_fields(line);
    if (f[0] == "M") {
        if (f.size() != 6) throw TraceError(line_no_, "M needs seq, tid, callsite, addr, size");
        AllocEvent m{parse_u64(f[1], line_no_, "seq"),
                     static_cast<uint32_t>(parse_u64(f[2], line_no_, "tid")),
                     parse_u64(f[3], line_no_, "callsite"), parse_hex(f[4], line_no_, "addr"),
                     parse_u64(f[5], line_no_, "size")};
        if (m.size == 0) throw TraceError(line_no_, "zero-size allocation");
        if (auto hit = find_overlap(live_, m.addr, m.size))
            throw TraceError(line_no_, "allocation " + to_hex(m.addr) + " overlaps live object " +
                                           to_hex(hit->first));
        live_[m.addr] = m.size;
        return m;
    }
    if (f[0] == "F") {
        if (f.size() != 4) throw TraceError(line_no_, "F needs seq, tid, addr");
        FreeEvent fr{parse_u64(f[1], line_no_, "seq"),
                     static_cast<uint32_t>(parse_u64(f[2], line_no_, "tid")),
                     parse_hex(f[3], line_no_, "addr")};
        auto it = live_.find(fr.addr);
        if (it == live_.end()) throw TraceError(line_no_, "unmatched free of " + to_hex(fr.addr));
        live_.erase(it);
        return fr;
    }
    if (f[0] == "A") {
        if (f.size() != 6) throw TraceError(line_no_, "A needs seq, tid, ip, addr, kind");
        AccessKind kind;
        if (f[5] == "L") kind = AccessKind::Load;
        else if (f[5] == "S") kind = AccessKind::Store;
        else throw TraceError(line_no_, "access kind must be L or S");
        return AccessEvent{parse_u64(f[1], line_no_, "seq"),
                           static_cast<uint32_t>(parse_u64(f[2], line_no_, "tid")),
                           parse_hex(f[3], line_no_, "ip"), parse_hex(f[4], line_no_, "addr"),
                           kind};
    }
    throw TraceError(line_no_, "unknown record type '" + std::string(f[0]) + "'");
}

void write_trace_file(const std::string& path, const TraceHeader& header,
                      const std::vector<TraceEvent>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    TraceWriter w(out, header);
    for (const auto& ev : events) w.write(ev);
    if (!out) throw std::runtime_error("write failed for " + path);
}

TraceHeader read_trace_file(const std::string& path,
                            const std::function<void(const TraceEvent&)>& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    TraceReader r(in);
    while (auto ev = r.next()) sink(*ev);
    return r.header();
}

}  // namespace cachescope
