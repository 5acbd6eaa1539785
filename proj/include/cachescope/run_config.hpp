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

#include <string>
#include <utility>
#include <vector>

#include "cachescope/classifier.hpp"
#include "cachescope/profiler.hpp"
#include "cachescope/stores.hpp"

namespace cachescope {

// Effective run parameters. Sources merge in precedence order:
// defaults < config file < CACHESCOPE_* environment < command-line flags.
struct RunConfig {
    CacheConfig cache;
    SamplerConfig sampler;
    uint32_t window_capacity = 1000;
    BreakpointConfig bp;
    FilterThresholds filters;
    ObjectStore::SkipPolicy skip;

    void validate() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key=value" lines, '#' comments. Throws std::runtime_error with the line
// number on malformed input.
KeyValues parse_config_file(const std::string& path);

// Throws std::invalid_argument on unknown keys or unparsable values.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// All recognized config keys, e.g. "load_period". The environment variable
// for a key is "CACHESCOPE_" + uppercase(key).
const std::vector<std::string>& config_keys();

KeyValues environment_overrides();

RunConfig make_run_config(const std::string& config_file, const KeyValues& flag_overrides);

}  // namespace cachescope
