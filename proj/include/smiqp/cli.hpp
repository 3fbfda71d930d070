// Copyright 2026 The spectral-miqp Authors
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

// Command-line front end: solve, root-gaps, branch-study and gen.

#ifndef SMIQP_CLI_HPP
#define SMIQP_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smiqp/bnb.hpp"
#include "smiqp/problem.hpp"

namespace smiqp {

/// Exit codes: 0 Optimal, 2 time or node limit, 3 Infeasible, 1 error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

int exit_code(SolveStatus status);

/// Reads JSON, or QPLIB when the extension is .qplib.
Problem load_instance(const std::filesystem::path& path);

/// SolveResult as a JSON object. Non-finite numbers become null.
std::string solve_report_json(const SolveResult& result, const SolverConfig& config);

struct BranchStudyOptions {
  int n = 50;
  double density = 0.5;
  int samples = 100;
  std::uint64_t seed = 1;
};

struct BranchStudyResult {
  std::vector<double> approx;  ///< %gap per sample
  std::vector<double> gct;
  double median_approx = 0.0;
  double median_gct = 0.0;
};

/// Writes `sample,rule,gap_percent` rows and a closing
/// `# median_gap_percent approx=... gct=...` line.
BranchStudyResult cmd_branch_study(const BranchStudyOptions& options, std::ostream& csv);

struct RootGapOptions {
  std::filesystem::path corpus;
  double ub_time_limit = 10.0;  ///< seconds, when no oracle applies
  int jobs = 1;
  bool omit_time = false;       ///< write time_ms as 0 for byte-stable output
};

/// One row per (instance, relaxation): `instance,relaxation,bound,gap_percent,time_ms`.
/// Where f_UBD came from is reported on `meta`.
void cmd_root_gaps(const RootGapOptions& options, std::ostream& csv, std::ostream& meta);

/// `<family>_n<n>_d<density>_s<seed>.json` for seeds seed .. seed + count - 1.
std::vector<std::filesystem::path> cmd_generate(const GeneratorSpec& spec, int count,
                                                const std::filesystem::path& out_dir);

double median(std::vector<double> values);

}  // namespace smiqp

#endif  // SMIQP_CLI_HPP
