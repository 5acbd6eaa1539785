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

#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cachescope/cache_sim.hpp"
#include "cachescope/common.hpp"

namespace cachescope {

struct AccessEvent {
    uint64_t seq;
    uint32_t tid;
    uint64_t ip;
    uint64_t addr;
    AccessKind kind;

    bool operator==(const AccessEvent&) const = default;
};

struct AllocEvent {
    uint64_t seq;
    uint32_t tid;
    uint64_t callsite;
    uint64_t addr;
    uint64_t size;

    bool operator==(const AllocEvent&) const = default;
};

struct FreeEvent {
    uint64_t seq;
    uint32_t tid;
    uint64_t addr;

    bool operator==(const FreeEvent&) const = default;
};

using TraceEvent = std::variant<AllocEvent, FreeEvent, AccessEvent>;

uint64_t event_seq(const TraceEvent& ev);

struct GlobalRegion {
    std::string name;
    uint64_t start;
    uint64_t size;

    bool operator==(const GlobalRegion&) const = default;
};

struct TraceHeader {
    CacheConfig cache;
    std::vector<GlobalRegion> globals;
    std::map<uint64_t, std::string> symbols;  // ip -> file:line
    // "# GT key=value" sidecar lines, in file order.
    std::vector<std::pair<std::string, std::string>> ground_truth;

    bool operator==(const TraceHeader&) const = default;
};

class TraceError : public std::runtime_error {
public:
    TraceError(size_t line_no, const std::string& what)
        : std::runtime_error("trace line " + std::to_string(line_no) + ": " + what),
          line_no_(line_no) {}
    size_t line_no() const { return line_no_; }

private:
    size_t line_no_;
};

// Serializes a trace. Rejects out-of-order sequence numbers, overlapping
// live allocations, and frees without a matching allocation.
class TraceWriter {
public:
    TraceWriter(std::ostream& out, const TraceHeader& header);
    void write(const TraceEvent& ev);

private:
    std::ostream& out_;
    uint64_t last_seq_ = 0;
    bool any_event_ = false;
    std::map<uint64_t, uint64_t> live_;  // start -> size
    size_t line_no_ = 0;
};

// Streaming reader: header is parsed up front, events are yielded one at a
// time in file order. Malformed input raises TraceError with the offending
// line number; everything yielded before the error is valid.
class TraceReader {
public:
    explicit TraceReader(std::istream& in);

    const TraceHeader& header() const { return header_; }
    std::optional<TraceEvent> next();

private:
    bool fetch_line(std::string& line);
    TraceEvent parse_event(const std::string& line);

    std::istream& in_;
    TraceHeader header_;
    std::optional<std::string> pending_;
    size_t line_no_ = 0;
    uint64_t last_seq_ = 0;
    bool any_event_ = false;
    std::map<uint64_t, uint64_t> live_;  // start -> size, for free validation
};

void write_trace_file(const std::string& path, const TraceHeader& header,
                      const std::vector<TraceEvent>& events);

// Convenience wrapper: parses the file and feeds every event to sink.
TraceHeader read_trace_file(const std::string& path,
                            const std::function<void(const TraceEvent&)>& sink);

}  // namespace cachescope
