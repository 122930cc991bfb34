// Copyright 2026 The codemix Authors.
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

// Command-line front end: prepare, train, evaluate, predict, report.
//
// Exit codes: 0 success, 1 runtime failure (including training divergence),
// 2 usage or input error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "codemix/preprocess.hpp"

namespace codemix::cli {

inline constexpr const char* kPipelineVersion = "codemix 1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. args[0] is the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// The preprocess.json representation written by prepare and read back by
/// predict.
nlohmann::json preprocess_config_to_json(const PreprocessConfig& cfg);
PreprocessConfig preprocess_config_from_json(const nlohmann::json& j);

}  // namespace codemix::cli
