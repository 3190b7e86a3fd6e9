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

#include "toyfock/json_io.hpp"

#include <cmath>

namespace toyfock {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string join_path(const std::string& base, std::size_t index) {
  return base + "[" + std::to_string(index) + "]";
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError(join_path(path, it.key()), "unknown key (allowed: " + list + ")");
    }
  }
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join_path(path, key), "missing required key");
  return *it;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

std::size_t read_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

cplx read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return read_number(j, path);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {read_number(j[0], join_path(path, 0)), read_number(j[1], join_path(path, 1))};
  }
  throw ConfigError(path, "expected a complex number: a number or [re, im]");
}

json write_complex(cplx z) { return json::array({z.real(), z.imag()}); }

CVec read_vector(const json& j, std::size_t n, const std::string& path) {
  CVec v(static_cast<Eigen::Index>(n));
  if (n == 1 && (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))) {
    v(0) = read_complex(j, path);
    return v;
  }
  if (!j.is_array() || j.size() != n) {
    throw ConfigError(path, "expected an array of " + std::to_string(n) + " complex entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    v(static_cast<Eigen::Index>(i)) = read_complex(j[i], join_path(path, i));
  }
  return v;
}

json write_vector(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(write_complex(v(i)));
  return out;
}

CMat read_matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  if (!j.is_array() || j.size() != rows) {
    throw ConfigError(path, "expected " + std::to_string(rows) + " rows");
  }
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = join_path(path, r);
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(rp, "expected " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          read_complex(j[r][c], join_path(rp, c));
    }
  }
  return m;
}

namespace {

std::vector<double> read_times(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of times");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], join_path(path, i)));
  return out;
}

}  // namespace

StepFunction read_step_function(const json& j, std::size_t dim_k, const std::string& path) {
  check_keys(j, {"breakpoints", "values"}, path);
  const auto bp = read_times(require(j, "breakpoints", path), join_path(path, "breakpoints"));
  std::vector<CVec> values;
  if (j.contains("values")) {
    const json& vals = j["values"];
    const std::string vp = join_path(path, "values");
    if (!vals.is_array()) throw ConfigError(vp, "expected an array");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      values.push_back(read_vector(vals[i], dim_k, join_path(vp, i)));
    }
  }
  try {
    return StepFunction(dim_k, bp, values);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

json write_step_function(const StepFunction& f) {
  json values = json::array();
  for (const auto& v : f.values()) values.push_back(write_vector(v));
  return json{{"breakpoints", f.breakpoints()}, {"values", values}};
}

Partition read_partition(const json& j, const std::string& path) {
  check_keys(j, {"breakpoints"}, path);
  try {
    return Partition(read_times(require(j, "breakpoints", path), join_path(path, "breakpoints")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

json write_partition(const Partition& tau) { return json{{"breakpoints", tau.times()}}; }

json write_state(const ToyState& xi) {
  json terms = json::array();
  for (const Term& t : xi.terms()) {
    json sites = json::array();
    for (std::size_t n = 0; n < xi.cells(); ++n) {
      auto s = xi.site(t, n);
      json site = json::array();
      for (cplx z : s) site.push_back(write_complex(z));
      sites.push_back(site);
    }
    terms.push_back(json{{"coeff", write_complex(t.coeff)}, {"h", write_vector(t.h)},
                         {"sites", sites}});
  }
  return json{{"partition", write_partition(xi.partition())},
              {"dim_h", xi.dim_h()},
              {"dim_k", xi.dim_k()},
              {"terms", terms}};
}

}  // namespace toyfock
