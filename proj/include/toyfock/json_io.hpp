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

#include <initializer_list>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "toyfock/core_tensor.hpp"
#include "toyfock/time_grid.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock {

using json = nlohmann::json;

// Carries the key path (e.g. "studies[1].operator") of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error((path.empty() ? std::string("<root>") : path) + ": " + message),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string join_path(const std::string& base, const std::string& key);
std::string join_path(const std::string& base, std::size_t index);

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path);
const json& require(const json& j, const char* key, const std::string& path);

double read_number(const json& j, const std::string& path);
std::size_t read_count(const json& j, const std::string& path);

// A complex number is either a plain number or [re, im].
cplx read_complex(const json& j, const std::string& path);
json write_complex(cplx z);

// A vector of length n: an array of complex entries; for n = 1 a bare entry is accepted.
CVec read_vector(const json& j, std::size_t n, const std::string& path);
json write_vector(const CVec& v);

// Row-major array of rows, each an array of complex entries.
CMat read_matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& path);

// {"breakpoints": [...], "values": [v₀, v₁, ...]} with one ℂ^d value per cell.
StepFunction read_step_function(const json& j, std::size_t dim_k, const std::string& path);
json write_step_function(const StepFunction& f);

// {"breakpoints": [0, τ₁, ..., T]}.
Partition read_partition(const json& j, const std::string& path);
json write_partition(const Partition& tau);

// Debug dump: partition, dimensions and every term with its sites.
json write_state(const ToyState& xi);

}  // namespace toyfock
