// Copyright 2026 The toyfock Authors
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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toyfock/json_io.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock {

struct PartitionSet {
  std::string family;                // dyadic | uniform | explicit
  std::vector<Partition> partitions;
  std::vector<std::size_t> labels;   // level, cell count or list index
};

struct Probe {
  std::string u;
  std::string f;
  std::string v;
  std::string g;
};

enum class StudyKind { validate, weak_convergence, strong_convergence, ito, iterint_identity };

std::string_view study_kind_name(StudyKind kind);

struct StudyConfig {
  std::string name;
  StudyKind kind = StudyKind::validate;
  std::string op;      // weak, strong, iterint
  std::string left;    // ito: Y
  std::string right;   // ito: X
  double t = 1.0;
  std::vector<Probe> probes;
  std::optional<PartitionSet> partitions;
  std::optional<Partition> reference;
  double tolerance = 1e-10;
  std::optional<double> min_slope;
};

struct ExperimentConfig {
  std::size_t dim_k = 1;
  std::size_t dim_h = 1;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::string output = "results";
  bool timing = false;
  double tolerance = 1e-10;
  PartitionSet partitions;
  std::map<std::string, StepFunction> functions;
  std::map<std::string, CVec> vectors;
  std::map<std::string, CoupledOperator> operators;
  std::vector<StudyConfig> studies;
};

// Throws ConfigError with the key path, or with line/column for JSON syntax errors.
ExperimentConfig parse_config(const std::string& text,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// Least squares of log(err) on log(mesh) after dropping the `skip` coarsest levels.
// Empty if fewer than 3 usable points remain or any remaining error is zero.
std::optional<RateFit> fit_rate(const std::vector<double>& mesh, const std::vector<double>& err,
                                std::size_t skip = 2);

struct Row {
  std::string study;
  std::size_t level = 0;
  double mesh = 0.0;
  std::string probe;
  cplx value;
  cplx reference;
  double abs_error = 0.0;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct FitLine {
  std::string probe;
  std::optional<RateFit> fit;
  std::string status;  // "fitted", "exact", "insufficient"
};

struct StudyResult {
  std::string name;
  StudyKind kind = StudyKind::validate;
  std::vector<Row> rows;
  std::vector<FitLine> fits;
  std::vector<Check> checks;
  bool passed() const;
};

StudyResult run_validate(const ExperimentConfig& config,
                         std::optional<double> tolerance = std::nullopt);
StudyResult run_study(const ExperimentConfig& config, const StudyConfig& study);

std::string csv_header();
std::string render_csv(const std::vector<Row>& rows);
std::string render_markdown(const StudyResult& result);
std::string render_summary(const std::vector<StudyResult>& results);
// Markdown table from CSV text in the format written by render_csv.
std::string csv_to_markdown(const std::string& csv);

// Writes to a temporary sibling and renames over the target.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

// Writes <name>.csv and <name>.md for every study plus summary.md.
void write_reports(const std::filesystem::path& dir, const std::vector<StudyResult>& results);

}  // namespace toyfock
