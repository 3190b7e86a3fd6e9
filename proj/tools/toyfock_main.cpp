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

// Command-line front end: validate, run, table.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "toyfock/experiment.hpp"
#include "toyfock/json_io.hpp"
#include "toyfock/parallel.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string csv;
};

toyfock::ExperimentConfig read_config(const Options& opt) {
  if (opt.config.empty()) return toyfock::parse_config("{}", opt.seed);
  return toyfock::load_config(opt.config, opt.seed);
}

std::filesystem::path output_dir(const Options& opt, const toyfock::ExperimentConfig& cfg) {
  return opt.out.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(opt.out);
}

void print_result(const toyfock::StudyResult& r) {
  for (const auto& c : r.checks) {
    std::printf("%s  %s / %s  residual=%.3e  tol=%.3e%s%s\n", c.pass ? "PASS" : "FAIL",
                r.name.c_str(), c.name.c_str(), c.residual, c.tolerance,
                c.note.empty() ? "" : "  ", c.note.c_str());
  }
  for (const auto& f : r.fits) {
    if (f.fit) {
      std::printf("RATE  %s / %s  slope=%.4f  points=%zu\n", r.name.c_str(), f.probe.c_str(),
                  f.fit->slope, f.fit->points);
    } else {
      std::printf("RATE  %s / %s  %s\n", r.name.c_str(), f.probe.c_str(), f.status.c_str());
    }
  }
}

int cmd_validate(const Options& opt) {
  const auto cfg = read_config(opt);
  const auto result = toyfock::run_validate(cfg);
  print_result(result);
  if (!opt.out.empty()) toyfock::write_reports(opt.out, {result});
  return result.passed() ? 0 : 1;
}

int cmd_run(const Options& opt) {
  const auto cfg = read_config(opt);
  std::vector<toyfock::StudyResult> results;
  for (const auto& study : cfg.studies) {
    results.push_back(toyfock::run_study(cfg, study));
    print_result(results.back());
  }
  const auto dir = output_dir(opt, cfg);
  toyfock::write_reports(dir, results);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed();
  std::printf("%s  %zu studies, reports in %s\n", ok ? "PASS" : "FAIL", results.size(),
              dir.string().c_str());
  return ok ? 0 : 1;
}

int cmd_table(const Options& opt) {
  std::ifstream in(opt.csv, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + opt.csv);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string md = toyfock::csv_to_markdown(buf.str());
  if (opt.out.empty()) {
    std::cout << md;
  } else {
    toyfock::write_atomically(opt.out, md);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toy Fock space approximation of quantum stochastic integrals"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the configuration seed");
    sub->add_option("--threads", opt.threads, "Worker threads")
        ->check(CLI::Range(1u, cores));
  };

  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_option("--config", opt.config, "JSON configuration")->check(CLI::ExistingFile);
  validate->add_option("--out", opt.out, "Write validate.csv/.md and summary.md here");
  add_common(validate);

  auto* run = app.add_subcommand("run", "Run every study in the configuration");
  run->add_option("--config", opt.config, "JSON configuration")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", opt.out, "Output directory (overrides the configuration)");
  add_common(run);

  auto* table = app.add_subcommand("table", "Render a CSV report as a Markdown table");
  table->add_option("csv", opt.csv, "CSV file")->required()->check(CLI::ExistingFile);
  table->add_option("--out", opt.out, "Markdown file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {validate, run}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }
  toyfock::set_thread_count(opt.threads);

  try {
    if (*validate) return cmd_validate(opt);
    if (*run) return cmd_run(opt);
    return cmd_table(opt);
  } catch (const toyfock::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return 2;
}
