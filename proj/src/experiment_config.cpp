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

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "toyfock/discrete_calculus.hpp"
#include "toyfock/experiment.hpp"
#include "toyfock/rng.hpp"

namespace toyfock {

std::string_view study_kind_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::validate:
      return "validate";
    case StudyKind::weak_convergence:
      return "weak-convergence";
    case StudyKind::strong_convergence:
      return "strong-convergence";
    case StudyKind::ito:
      return "ito";
    case StudyKind::iterint_identity:
      return "iterint-identity";
  }
  return "unknown";
}

namespace {

constexpr unsigned kMaxDyadicLevel = 10;

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Partition partition_from(const std::string& family, std::size_t n, double horizon,
                         const std::string& path) {
  if (family == "dyadic") {
    if (n > kMaxDyadicLevel) {
      throw ConfigError(path, "dyadic level " + std::to_string(n) + " exceeds " +
                                  std::to_string(kMaxDyadicLevel));
    }
    return Partition::dyadic(static_cast<unsigned>(n), horizon);
  }
  if (n == 0 || n > (std::size_t{1} << kMaxDyadicLevel)) {
    throw ConfigError(path, "cell count must lie in 1..1024");
  }
  return Partition::uniform(n, horizon);
}

void check_horizon(const Partition& tau, double horizon, const std::string& path) {
  if (std::abs(tau.horizon() - horizon) > kTimeTolerance) {
    throw ConfigError(path, "partition must end at the horizon " + std::to_string(horizon));
  }
}

PartitionSet read_partition_set(const json& j, double horizon, const std::string& path) {
  check_keys(j, {"family", "levels", "cells", "lists"}, path);
  PartitionSet out;
  out.family = read_string(require(j, "family", path), join_path(path, "family"));
  auto numbers = [&](const char* key) {
    const std::string kp = join_path(path, key);
    const json& arr = require(j, key, path);
    if (!arr.is_array() || arr.empty()) throw ConfigError(kp, "expected a non-empty array");
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < arr.size(); ++i) v.push_back(read_count(arr[i], join_path(kp, i)));
    return v;
  };
  if (out.family == "dyadic" || out.family == "uniform") {
    const char* key = out.family == "dyadic" ? "levels" : "cells";
    const char* other = out.family == "dyadic" ? "cells" : "levels";
    if (j.contains(other) || j.contains("lists")) {
      throw ConfigError(path, std::string("family '") + out.family + "' takes only '" + key + "'");
    }
    out.labels = numbers(key);
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      out.partitions.push_back(
          partition_from(out.family, out.labels[i], horizon, join_path(join_path(path, key), i)));
    }
  } else if (out.family == "explicit") {
    if (j.contains("levels") || j.contains("cells")) {
      throw ConfigError(path, "family 'explicit' takes only 'lists'");
    }
    const json& lists = require(j, "lists", path);
    const std::string lp = join_path(path, "lists");
    if (!lists.is_array() || lists.empty()) throw ConfigError(lp, "expected a non-empty array");
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const std::string ip = join_path(lp, i);
      out.partitions.push_back(read_partition(json{{"breakpoints", lists[i]}}, ip));
      check_horizon(out.partitions.back(), horizon, ip);
      out.labels.push_back(i);
    }
  } else {
    throw ConfigError(join_path(path, "family"), "expected 'dyadic', 'uniform' or 'explicit'");
  }
  return out;
}

Partition read_reference(const json& j, double horizon, const std::string& path) {
  check_keys(j, {"family", "level", "cells", "breakpoints"}, path);
  if (j.contains("breakpoints")) {
    if (j.contains("family")) throw ConfigError(path, "give either 'family' or 'breakpoints'");
    Partition p = read_partition(json{{"breakpoints", j["breakpoints"]}}, path);
    check_horizon(p, horizon, path);
    return p;
  }
  const std::string family = read_string(require(j, "family", path), join_path(path, "family"));
  if (family == "dyadic") {
    return partition_from(family, read_count(require(j, "level", path), join_path(path, "level")),
                          horizon, join_path(path, "level"));
  }
  if (family == "uniform") {
    return partition_from(family, read_count(require(j, "cells", path), join_path(path, "cells")),
                          horizon, join_path(path, "cells"));
  }
  throw ConfigError(join_path(path, "family"), "expected 'dyadic' or 'uniform'");
}

class OperatorTable {
 public:
  OperatorTable(const json& defs, const ExperimentConfig& cfg, const std::string& path)
      : defs_(defs), cfg_(cfg), path_(path) {}

  std::map<std::string, CoupledOperator> resolve_all() {
    for (auto it = defs_.begin(); it != defs_.end(); ++it) get(it.key(), path_);
    return std::move(done_);
  }

 private:
  const CoupledOperator& get(const std::string& name, const std::string& from) {
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    if (!defs_.contains(name)) throw ConfigError(from, "unknown operator '" + name + "'");
    if (active_.count(name)) throw ConfigError(from, "operator '" + name + "' refers to itself");
    active_.insert(name);
    CoupledOperator op = build(name, defs_[name], join_path(path_, name));
    active_.erase(name);
    return done_.emplace(name, std::move(op)).first->second;
  }

  const CoupledOperator& ref(const json& j, const char* key, const std::string& path) {
    const std::string kp = join_path(path, key);
    return get(read_string(require(j, key, path), kp), kp);
  }

  CoupledOperator build(const std::string& name, const json& j, const std::string& path) {
    const std::size_t h = cfg_.dim_h, d = cfg_.dim_k;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    if (j.contains("blocks")) {
      check_keys(j, {"blocks"}, path);
      const json& b = j["blocks"];
      const std::string bp = join_path(path, "blocks");
      check_keys(b, {"E", "F", "G", "H"}, bp);
      auto block = [&](const char* key, std::size_t r, std::size_t c) {
        if (!b.contains(key)) {
          return CMat(CMat::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        return read_matrix(b[key], r, c, join_path(bp, key));
      };
      return assemble(NoiseBlocks{block("E", h, h), block("F", h, h * d), block("G", h * d, h),
                                  block("H", h * d, h * d)},
                      h, d);
    }
    if (j.contains("matrix")) {
      check_keys(j, {"matrix", "arity"}, path);
      const std::size_t arity =
          j.contains("arity") ? read_count(j["arity"], join_path(path, "arity")) : 1;
      if (arity < 1 || arity > 3) throw ConfigError(join_path(path, "arity"), "expected 1..3");
      const std::size_t n = CoupledOperator::zero(h, d, arity).dim();
      return CoupledOperator(read_matrix(j["matrix"], n, n, join_path(path, "matrix")), h, d,
                             arity);
    }
    const std::string preset =
        read_string(require(j, "preset", path), join_path(path, "preset"));
    auto component = [&](const char* key) -> std::size_t {
      if (!j.contains(key)) return 0;
      const std::size_t c = read_count(j[key], join_path(path, key));
      if (c >= d) {
        throw ConfigError(join_path(path, key), "component must be below d = " + std::to_string(d));
      }
      return c;
    };
    if (preset == "time") {
      check_keys(j, {"preset"}, path);
      return noise::time(h, d);
    }
    if (preset == "creation" || preset == "annihilation") {
      check_keys(j, {"preset", "component"}, path);
      return preset == "creation" ? noise::creation(h, d, component("component"))
                                  : noise::annihilation(h, d, component("component"));
    }
    if (preset == "conservation") {
      check_keys(j, {"preset", "row", "col"}, path);
      return noise::conservation(h, d, component("row"), component("col"));
    }
    if (preset == "identity" || preset == "random") {
      check_keys(j, {"preset", "arity", "seed"}, path);
      const std::size_t arity =
          j.contains("arity") ? read_count(j["arity"], join_path(path, "arity")) : 1;
      if (arity < 1 || arity > 3) throw ConfigError(join_path(path, "arity"), "expected 1..3");
      if (preset == "identity") {
        if (j.contains("seed")) throw ConfigError(join_path(path, "seed"), "not used by identity");
        return CoupledOperator::identity(h, d, arity);
      }
      std::uint64_t seed = cfg_.seed ^ fnv1a64(name);
      if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) {
          throw ConfigError(join_path(path, "seed"), "expected a non-negative integer");
        }
        seed = j["seed"].get<std::uint64_t>();
      }
      return random_operator(h, d, arity, seed);
    }
    if (preset == "triangle_left" || preset == "triangle_right") {
      check_keys(j, {"preset", "left", "right"}, path);
      const CoupledOperator& a = ref(j, "left", path);
      const CoupledOperator& b = ref(j, "right", path);
      return preset == "triangle_left" ? triangle_left(a, b) : triangle_right(a, b);
    }
    if (preset == "product") {
      check_keys(j, {"preset", "factors"}, path);
      const json& fs = require(j, "factors", path);
      const std::string fp = join_path(path, "factors");
      if (!fs.is_array() || fs.empty()) throw ConfigError(fp, "expected a non-empty array");
      std::optional<CoupledOperator> acc;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::string ip = join_path(fp, i);
        const CoupledOperator& f = get(read_string(fs[i], ip), ip);
        if (acc && acc->arity() != f.arity()) throw ConfigError(ip, "arity mismatch in product");
        acc = acc ? *acc * f : f;
      }
      return *acc;
    }
    if (preset == "adjoint") {
      check_keys(j, {"preset", "of"}, path);
      return ref(j, "of", path).adjoint();
    }
    throw ConfigError(join_path(path, "preset"),
                      "unknown preset '" + preset +
                          "' (time, creation, annihilation, conservation, identity, random, "
                          "triangle_left, triangle_right, product, adjoint)");
  }

  const json& defs_;
  const ExperimentConfig& cfg_;
  std::string path_;
  std::map<std::string, CoupledOperator> done_;
  std::set<std::string> active_;
};

StudyKind read_kind(const json& j, const std::string& path) {
  const std::string k = read_string(j, path);
  for (StudyKind kind : {StudyKind::validate, StudyKind::weak_convergence,
                         StudyKind::strong_convergence, StudyKind::ito,
                         StudyKind::iterint_identity}) {
    if (k == study_kind_name(kind)) return kind;
  }
  throw ConfigError(path,
                    "unknown study kind '" + k +
                        "' (validate, weak-convergence, strong-convergence, ito, iterint-identity)");
}

void read_study(const json& j, ExperimentConfig& cfg, std::size_t index, const std::string& path) {
  check_keys(j, {"name", "kind", "operator", "left", "right", "t", "probes", "partitions",
                 "reference", "tolerance", "min_slope"},
             path);
  StudyConfig s;
  s.kind = read_kind(require(j, "kind", path), join_path(path, "kind"));
  s.name = j.contains("name") ? read_string(j["name"], join_path(path, "name"))
                              : std::string(study_kind_name(s.kind)) + "-" + std::to_string(index);
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError(join_path(path, "name"), "study names must be non-empty file names");
  }
  for (const auto& other : cfg.studies) {
    if (other.name == s.name) throw ConfigError(join_path(path, "name"), "duplicate study name");
  }
  s.tolerance = cfg.tolerance;
  if (j.contains("tolerance")) {
    s.tolerance = read_number(j["tolerance"], join_path(path, "tolerance"));
    if (s.tolerance < 0.0) throw ConfigError(join_path(path, "tolerance"), "must be >= 0");
  }
  if (j.contains("min_slope")) s.min_slope = read_number(j["min_slope"], join_path(path, "min_slope"));
  if (j.contains("t")) s.t = read_number(j["t"], join_path(path, "t"));
  if (s.t < 0.0 || s.t > cfg.horizon + kTimeTolerance) {
    throw ConfigError(join_path(path, "t"), "t must lie in [0, horizon]");
  }
  if (j.contains("partitions")) {
    s.partitions = read_partition_set(j["partitions"], cfg.horizon, join_path(path, "partitions"));
  }
  if (j.contains("reference")) {
    s.reference = read_reference(j["reference"], cfg.horizon, join_path(path, "reference"));
  }

  auto op_name = [&](const char* key) {
    const std::string kp = join_path(path, key);
    const std::string n = read_string(require(j, key, path), kp);
    if (!cfg.operators.count(n)) throw ConfigError(kp, "unknown operator '" + n + "'");
    return n;
  };
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (j.contains(k)) {
        throw ConfigError(join_path(path, k), std::string("not used by study kind '") +
                                                  std::string(study_kind_name(s.kind)) + "'");
      }
    }
  };
  switch (s.kind) {
    case StudyKind::validate:
      forbid({"operator", "left", "right", "t", "probes", "partitions", "reference", "min_slope"});
      break;
    case StudyKind::weak_convergence:
    case StudyKind::iterint_identity:
      forbid({"left", "right", "reference"});
      s.op = op_name("operator");
      if (cfg.operators.at(s.op).arity() > 2) {
        throw ConfigError(join_path(path, "operator"), "closed forms cover arity 1 and 2 only");
      }
      break;
    case StudyKind::strong_convergence:
      forbid({"left", "right"});
      s.op = op_name("operator");
      if (!s.reference) throw ConfigError(join_path(path, "reference"), "missing required key");
      break;
    case StudyKind::ito:
      forbid({"operator", "reference"});
      s.left = op_name("left");
      s.right = op_name("right");
      if (cfg.operators.at(s.left).arity() != 1 || cfg.operators.at(s.right).arity() != 1) {
        throw ConfigError(path, "ito studies need arity-1 operators");
      }
      break;
  }

  if (s.kind != StudyKind::validate) {
    const std::string pp = join_path(path, "probes");
    const json& probes = require(j, "probes", path);
    if (!probes.is_array() || probes.empty()) throw ConfigError(pp, "expected a non-empty array");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const std::string ip = join_path(pp, i);
      check_keys(probes[i], {"u", "f", "v", "g"}, ip);
      Probe p{"unit", "zero", "unit", "zero"};
      auto field = [&](const char* key, std::string& out, bool vector) {
        if (!probes[i].contains(key)) return;
        const std::string kp = join_path(ip, key);
        out = read_string(probes[i][key], kp);
        if (vector ? !cfg.vectors.count(out) : !cfg.functions.count(out)) {
          throw ConfigError(kp, std::string("unknown ") + (vector ? "vector" : "function") +
                                    " '" + out + "'");
        }
      };
      field("u", p.u, true);
      field("f", p.f, false);
      field("v", p.v, true);
      field("g", p.g, false);
      s.probes.push_back(p);
    }
    const PartitionSet& ps = s.partitions ? *s.partitions : cfg.partitions;
    if (ps.partitions.empty()) {
      throw ConfigError(join_path(path, "partitions"), "no partitions configured");
    }
    if (s.reference) {
      for (std::size_t i = 0; i < ps.partitions.size(); ++i) {
        if (!refines(*s.reference, ps.partitions[i])) {
          throw ConfigError(join_path(path, "reference"),
                            "reference does not refine partition " + std::to_string(i));
        }
      }
    }
  }
  cfg.studies.push_back(std::move(s));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col),
                      std::string("JSON syntax error: ") + e.what());
  }
  check_keys(root, {"dimensions", "horizon", "seed", "output", "timing", "tolerance",
                    "partitions", "functions", "vectors", "operators", "studies"},
             "");
  ExperimentConfig cfg;
  if (root.contains("dimensions")) {
    const json& dims = root["dimensions"];
    check_keys(dims, {"d", "dim_h"}, "dimensions");
    if (dims.contains("d")) cfg.dim_k = read_count(dims["d"], "dimensions.d");
    if (dims.contains("dim_h")) cfg.dim_h = read_count(dims["dim_h"], "dimensions.dim_h");
    if (cfg.dim_k < 1 || cfg.dim_k > 3) throw ConfigError("dimensions.d", "expected 1..3");
    if (cfg.dim_h < 1 || cfg.dim_h > 4) throw ConfigError("dimensions.dim_h", "expected 1..4");
  }
  if (root.contains("horizon")) {
    cfg.horizon = read_number(root["horizon"], "horizon");
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon", "must be positive");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) {
      throw ConfigError("seed", "expected a non-negative 64-bit integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (seed_override) cfg.seed = *seed_override;
  if (root.contains("output")) cfg.output = read_string(root["output"], "output");
  if (root.contains("timing")) {
    if (!root["timing"].is_boolean()) throw ConfigError("timing", "expected true or false");
    cfg.timing = root["timing"].get<bool>();
  }
  if (root.contains("tolerance")) {
    cfg.tolerance = read_number(root["tolerance"], "tolerance");
    if (cfg.tolerance < 0.0) throw ConfigError("tolerance", "must be >= 0");
  }
  if (root.contains("partitions")) {
    cfg.partitions = read_partition_set(root["partitions"], cfg.horizon, "partitions");
  }

  cfg.functions.emplace("zero", StepFunction::zero(cfg.dim_k));
  if (root.contains("functions")) {
    const json& fs = root["functions"];
    if (!fs.is_object()) throw ConfigError("functions", "expected an object");
    for (auto it = fs.begin(); it != fs.end(); ++it) {
      const std::string p = join_path("functions", it.key());
      if (it.key() == "zero") throw ConfigError(p, "'zero' is built in");
      StepFunction f = read_step_function(it.value(), cfg.dim_k, p);
      for (std::size_t i = 0; i < f.values().size(); ++i) {
        if (f.breakpoints()[i + 1] > cfg.horizon + kTimeTolerance && f.values()[i].norm() > 0) {
          throw ConfigError(p, "support extends past the horizon");
        }
      }
      cfg.functions.emplace(it.key(), std::move(f));
    }
  }
  cfg.vectors.emplace("unit", CVec::Unit(static_cast<Eigen::Index>(cfg.dim_h), 0));
  if (root.contains("vectors")) {
    const json& vs = root["vectors"];
    if (!vs.is_object()) throw ConfigError("vectors", "expected an object");
    for (auto it = vs.begin(); it != vs.end(); ++it) {
      const std::string p = join_path("vectors", it.key());
      if (it.key() == "unit") throw ConfigError(p, "'unit' is built in");
      cfg.vectors.emplace(it.key(), read_vector(it.value(), cfg.dim_h, p));
    }
  }
  if (root.contains("operators")) {
    const json& ops = root["operators"];
    if (!ops.is_object()) throw ConfigError("operators", "expected an object");
    cfg.operators = OperatorTable(ops, cfg, "operators").resolve_all();
  }
  if (root.contains("studies")) {
    const json& st = root["studies"];
    if (!st.is_array()) throw ConfigError("studies", "expected an array");
    for (std::size_t i = 0; i < st.size(); ++i) {
      read_study(st[i], cfg, i, join_path("studies", i));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), seed_override);
}

}  // namespace toyfock
