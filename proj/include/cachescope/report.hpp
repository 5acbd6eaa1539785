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

#include <json.hpp>

#include "cachescope/pipeline.hpp"
#include "cachescope/run_config.hpp"

namespace cachescope {

nlohmann::ordered_json config_json(const RunConfig& cfg);

nlohmann::ordered_json profile_report_json(const ProfileResult& result, const RunConfig& cfg,
                                           const std::string& trace_id);
std::string profile_report_text(const ProfileResult& result, const std::string& trace_id);

nlohmann::ordered_json oracle_report_json(const OracleResult& result);
std::string oracle_report_text(const OracleResult& result);

}  // namespace cachescope
