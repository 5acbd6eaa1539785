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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace cachescope {

enum class AccessKind : uint8_t { Load, Store };

inline char access_kind_char(AccessKind k) {
    return k == AccessKind::Load ? 'L' : 'S';
}

// 64-bit mixer used to derive independent RNG lanes from (seed, tid, ...).
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform draw in [lo, hi]. std::uniform_int_distribution is not specified
// bit-exactly across standard libraries, so the bounded draw is explicit.
inline uint64_t uniform_in(std::mt19937_64& rng, uint64_t lo, uint64_t hi) {
    if (lo >= hi) return lo;
    const uint64_t span = hi - lo + 1;
    const uint64_t limit = std::numeric_limits<uint64_t>::max() / span * span;
    uint64_t v = rng();
    while (v >= limit) v = rng();
    return lo + v % span;
}

inline std::string to_hex(uint64_t v) {
    char buf[19];
    int n = snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
    return std::string(buf, static_cast<size_t>(n));
}

}  // namespace cachescope
