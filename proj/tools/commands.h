//
// Copyright 2026 The lattice-dp Authors.
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
//

#ifndef LATTICE_DP_TOOLS_COMMANDS_H_
#define LATTICE_DP_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lattice_dp/constraints.h"
#include "lattice_dp/noise.h"
#include "lattice_dp/status.h"

namespace lattice_dp::cli {

inline constexpr char kToolVersion[] = "0.1.0";

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitTimeout = 4;

int ExitCodeFor(ErrorCode code);

// Everything a subcommand needs. Loaded from a JSON config and then
// overridden by command-line flags.
struct ExperimentConfig {
  // A path to a constraint document, an inline document, or a builder:
  // {"table": {"rows": r, "cols": c}}, {"partition": [sizes...]},
  // {"sum": true}.
  nlohmann::json constraints;
  std::string data_path;
  std::string data_format = "histogram";  // or "county"
  std::string state;  // county data: state used by single-lattice commands
  NoiseKind kind = NoiseKind::kLaplaceL1;
  double epsilon = 0.25;
  double delta = 0.0;
  std::optional<std::uint64_t> nsim;
  std::optional<std::uint64_t> burn_in;
  std::optional<std::uint64_t> thin;
  std::uint64_t seed = 1;
  std::optional<double> a;
  std::optional<double> c_a;
  std::vector<std::size_t> lags = {1};
  std::optional<std::size_t> replicates;
  std::vector<std::uint64_t> l_grid;
  std::uint64_t max_iterations = 10'000'000;
  std::size_t chains = 4;
  std::optional<double> overdispersed_epsilon;
  std::optional<std::uint64_t> overdispersed_steps;
  std::string out_dir = ".";
  std::string base_dir = ".";  // relative paths resolve against this
};

ExperimentConfig ConfigFromJson(const nlohmann::json& doc,
                                const std::string& base_dir);
ExperimentConfig LoadConfig(const std::string& path);

// Default burn-in for a target kind when the config does not set one.
std::uint64_t DefaultBurnIn(NoiseKind kind);
inline constexpr std::uint64_t kDefaultThin = 10'000;

// Resolves the constraint source; `dimension` is the data length, used by the
// "sum" builder and checked against explicit documents.
ConstraintSet ResolveConstraints(const ExperimentConfig& cfg,
                                 std::size_t dimension);

// Entry point shared by the binary and the tests. Returns the exit status.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace lattice_dp::cli

#endif  // LATTICE_DP_TOOLS_COMMANDS_H_
