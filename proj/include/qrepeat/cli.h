// Copyright 2026 The qrepeat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREPEAT_CLI_H
#define QREPEAT_CLI_H

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qrepeat/analytics.h"
#include "qrepeat/protocol.h"

namespace qrepeat {

/// Environment variable holding the default seed.
inline constexpr const char *kSeedEnv = "QREPEAT_SEED";

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitConfig = 2 };

enum class OutputFormat { Json, Csv };

struct RunConfig {
    std::string subcommand;
    ChainConfig chain;  ///< chain.params holds the noise parameters
    OutputFormat output_format = OutputFormat::Json;
    std::optional<std::string> output_path;
    std::optional<std::string> event_log;
    bool paper_style = false;
    std::vector<double> etas = default_table1_etas();

    const NoiseParams &params() const {
        return chain.params;
    }
};

const std::vector<std::string> &subcommands();

/// Keys accepted in config files and overrides, with their defaults.
const std::vector<std::pair<std::string, std::string>> &config_keys();

/// Parses `key = value` lines (`#` starts a comment) and then applies the
/// `key=value` overrides. Throws ConfigError naming the line on unknown keys,
/// unparseable values or out-of-range parameters.
RunConfig parse_config(
    const std::string &subcommand, const std::string &text, const std::string &source,
    const std::vector<std::string> &overrides);

/// Reads `path` (when given) and forwards to parse_config.
RunConfig load_config(
    const std::string &subcommand, const std::optional<std::string> &path, const std::vector<std::string> &overrides);

/// Executes one subcommand, writing the report to `out` unless the config
/// names an output file. Returns an ExitCode.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Full command-line entry point.
int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err);

}  // namespace qrepeat

#endif
