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

// Study runners, rate fits and report rendering.

#include "toyfock/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "toyfock/discrete_calculus.hpp"
#include "toyfock/qs_oracle.hpp"

namespace toyfock {

namespace {

// Strong and Itô runs apply arity-2 or product sums; their term counts grow
// quadratically in the cell count.
constexpr std::size_t kMaxIdentityCells = 64;
constexpr double kExactFloor = 1e-13;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(clock::now()) {}
  double seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  bool enabled_;
  clock::time_point start_;
};

struct ProbeData {
  std::string label;
  const CVec* u;
  const StepFunction* f;
  const CVec* v;
  const StepFunction* g;
};

std::vector<ProbeData> resolve_probes(const ExperimentConfig& config, const StudyConfig& study) {
  std::vector<ProbeData> out;
  for (const Probe& p : study.probes) {
    out.push_back({p.u + ":" + p.f + "|" + p.v + ":" + p.g, &config.vectors.at(p.u),
                   &config.functions.at(p.f), &config.vectors.at(p.v),
                   &config.functions.at(p.g)});
  }
  return out;
}

const PartitionSet& partitions_of(const ExperimentConfig& config, const StudyConfig& study) {
  return study.partitions ? *study.partitions : config.partitions;
}

// Fits one error series; rows of the series share the probe label.
FitLine fit_series(const std::string& probe, const std::vector<double>& mesh,
                   const std::vector<double>& err, double scale) {
  FitLine line;
  line.probe = probe;
  const bool exact = std::all_of(err.begin(), err.end(),
                                 [&](double e) { return e <= kExactFloor * scale; });
  if (exact) {
    line.status = "exact";
    return line;
  }
  line.fit = fit_rate(mesh, err);
  line.status = line.fit ? "fitted" : "insufficient";
  return line;
}

void slope_checks(StudyResult& out, const StudyConfig& study) {
  if (!study.min_slope) return;
  for (const FitLine& line : out.fits) {
    Check c;
    c.name = "rate " + line.probe;
    c.tolerance = *study.min_slope;
    c.note = line.status;
    if (line.status == "exact") {
      c.pass = true;
    } else if (line.fit) {
      c.residual = line.fit->slope;
      c.pass = line.fit->slope >= *study.min_slope;
    } else {
      c.residual = std::nan("");
      c.pass = false;
    }
    out.checks.push_back(std::move(c));
  }
}

Check max_check(const std::string& name, const std::vector<double>& residuals, double tol,
                std::string note) {
  Check c;
  c.name = name;
  c.tolerance = tol;
  c.note = std::move(note);
  c.residual = 0.0;
  bool finite = true;
  for (double r : residuals) {
    if (!std::isfinite(r)) finite = false;
    c.residual = std::max(c.residual, r);
  }
  c.pass = finite && c.residual <= tol;
  if (!finite) c.residual = std::nan("");
  return c;
}

StudyResult run_weak(const ExperimentConfig& config, const StudyConfig& study) {
  StudyResult out{study.name, study.kind, {}, {}, {}};
  const CoupledOperator& x = config.operators.at(study.op);
  const PartitionSet& set = partitions_of(config, study);
  std::vector<double> finite;
  for (const ProbeData& p : resolve_probes(config, study)) {
    const IntegralSpec spec{x, study.t, std::nullopt, WeightKind::continuous, std::nullopt,
                            std::nullopt};
    const cplx reference = lambda_element(spec, *p.u, *p.f, *p.v, *p.g);
    std::vector<double> meshes, errs;
    for (std::size_t k = 0; k < set.partitions.size(); ++k) {
      const Partition& tau = set.partitions[k];
      const Stopwatch clock(config.timing);
      const cplx value = sigma_element(x, tau, study.t, *p.u, *p.f, *p.v, *p.g);
      Row row{study.name, set.labels[k], mesh(tau), p.label, value, reference,
              std::abs(value - reference), clock.seconds()};
      meshes.push_back(row.mesh);
      errs.push_back(row.abs_error);
      finite.push_back(std::isfinite(row.abs_error) ? 0.0 : std::nan(""));
      out.rows.push_back(std::move(row));
    }
    out.fits.push_back(fit_series(p.label, meshes, errs, std::max(1.0, std::abs(reference))));
  }
  out.checks.push_back(max_check("finite values", finite, 0.0, "identity"));
  slope_checks(out, study);
  return out;
}

// ‖ξ − η‖ with ξ on τ and η on a refinement σ.
double strong_gap(const ToyState& xi, const ToyState& eta) {
  if (xi.partition() == eta.partition()) return norm(add_scaled(xi, -1.0, eta));
  const double a = norm(xi), b = norm(eta);
  const double sq = a * a - 2.0 * cross_inner(xi, eta).real() + b * b;
  return std::sqrt(std::max(sq, 0.0));
}

StudyResult run_strong(const ExperimentConfig& config, const StudyConfig& study) {
  StudyResult out{study.name, study.kind, {}, {}, {}};
  const CoupledOperator& x = config.operators.at(study.op);
  const PartitionSet& set = partitions_of(config, study);
  const Partition& sigma = *study.reference;
  if (x.arity() > 1 && sigma.cells() > kMaxIdentityCells) {
    throw std::invalid_argument("study '" + study.name +
                                "': arity-2 strong runs need a reference with at most " +
                                std::to_string(kMaxIdentityCells) + " cells");
  }
  std::vector<double> cs_excess;
  for (const ProbeData& p : resolve_probes(config, study)) {
    const ToyState eta = sigma_apply(x, sigma, study.t, embed_exponential(*p.v, *p.g, sigma));
    const ToyState probe_sigma = embed_exponential(*p.u, *p.f, sigma);
    const cplx weak_ref = inner(probe_sigma, eta);
    const double probe_norm = norm(probe_sigma);
    std::vector<double> meshes, errs;
    for (std::size_t k = 0; k < set.partitions.size(); ++k) {
      const Partition& tau = set.partitions[k];
      const Stopwatch clock(config.timing);
      const ToyState xi = sigma_apply(x, tau, study.t, embed_exponential(*p.v, *p.g, tau));
      const double gap = strong_gap(xi, eta);
      Row row{study.name, set.labels[k], mesh(tau), p.label, gap, 0.0, gap, clock.seconds()};
      // |⟨a, ξ − η⟩| ≤ ‖a‖‖ξ − η‖ for the σ-embedded probe a.
      const cplx weak = std::conj(cross_inner(xi, probe_sigma)) - weak_ref;
      cs_excess.push_back(std::max(0.0, std::abs(weak) - probe_norm * gap -
                                            1e-10 * std::max(1.0, std::abs(weak_ref))));
      meshes.push_back(row.mesh);
      errs.push_back(gap);
      out.rows.push_back(std::move(row));
    }
    out.fits.push_back(fit_series(p.label, meshes, errs, std::max(1.0, norm(eta))));
  }
  out.checks.push_back(max_check("weak gap within strong gap", cs_excess, 0.0, "bound"));
  slope_checks(out, study);
  return out;
}

StudyResult run_ito(const ExperimentConfig& config, const StudyConfig& study) {
  StudyResult out{study.name, study.kind, {}, {}, {}};
  const CoupledOperator& y = config.operators.at(study.left);
  const CoupledOperator& x = config.operators.at(study.right);
  const CoupledOperator y_star = y.adjoint();
  const PartitionSet& set = partitions_of(config, study);
  std::vector<double> defects;
  for (const ProbeData& p : resolve_probes(config, study)) {
    const cplx limit = ito_limit_element(y, x, study.t, *p.u, *p.f, *p.v, *p.g);
    std::vector<double> meshes, z_norms, element_errs;
    for (std::size_t k = 0; k < set.partitions.size(); ++k) {
      const Partition& tau = set.partitions[k];
      const double h = mesh(tau);
      const ToyState theta = embed_exponential(*p.v, *p.g, tau);
      if (tau.cells() <= kMaxIdentityCells) {
        const Stopwatch clock(config.timing);
        const double defect =
            triangle_norm_bound(ito_identity_defect(y, x, tau, study.t, theta)) /
            std::max(1.0, norm(theta));
        defects.push_back(defect);
        out.rows.push_back({study.name, set.labels[k], h, p.label + "/identity", defect, 0.0,
                            defect, clock.seconds()});
      }
      {
        const Stopwatch clock(config.timing);
        const double z = norm(ito_residual_apply(y, x, tau, study.t, theta));
        z_norms.push_back(z);
        out.rows.push_back(
            {study.name, set.labels[k], h, p.label + "/Z", z, 0.0, z, clock.seconds()});
      }
      {
        const Stopwatch clock(config.timing);
        const cplx value = inner(sigma_apply(y_star, tau, study.t,
                                             embed_exponential(*p.u, *p.f, tau)),
                                 sigma_apply(x, tau, study.t, theta));
        const double err = std::abs(value - limit);
        element_errs.push_back(err);
        out.rows.push_back({study.name, set.labels[k], h, p.label + "/element", value, limit,
                            err, clock.seconds()});
      }
      meshes.push_back(h);
    }
    out.fits.push_back(fit_series(p.label + "/Z", meshes, z_norms, 1.0));
    out.fits.push_back(fit_series(p.label + "/element", meshes, element_errs,
                                  std::max(1.0, std::abs(limit))));
  }
  out.checks.push_back(max_check("exact product identity", defects, study.tolerance, "identity"));
  slope_checks(out, study);
  return out;
}

StudyResult run_iterint(const ExperimentConfig& config, const StudyConfig& study) {
  StudyResult out{study.name, study.kind, {}, {}, {}};
  const CoupledOperator& x = config.operators.at(study.op);
  const PartitionSet& set = partitions_of(config, study);
  std::vector<double> residuals;
  for (const ProbeData& p : resolve_probes(config, study)) {
    for (std::size_t k = 0; k < set.partitions.size(); ++k) {
      const Partition& tau = set.partitions[k];
      const Stopwatch clock(config.timing);
      const cplx value = sigma_element(x, tau, study.t, *p.u, *p.f, *p.v, *p.g);
      const IntegralSpec spec{x, study.t, tau, WeightKind::discrete, tau, tau};
      const cplx reference = lambda_element(spec, *p.u, *p.f, *p.v, *p.g);
      const double err = std::abs(value - reference);
      residuals.push_back(err / std::max(1.0, std::abs(reference)));
      out.rows.push_back({study.name, set.labels[k], mesh(tau), p.label, value, reference, err,
                          clock.seconds()});
    }
  }
  out.checks.push_back(
      max_check("discrete sum equals subordinate integral", residuals, study.tolerance,
                "identity"));
  return out;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quote in CSV line: " + line);
  return out;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "study" : out;
}

}  // namespace

bool StudyResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::optional<RateFit> fit_rate(const std::vector<double>& mesh, const std::vector<double>& err,
                                std::size_t skip) {
  if (mesh.size() != err.size()) throw std::invalid_argument("fit_rate: length mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < mesh.size(); ++i) pts.emplace_back(mesh[i], err[i]);
  // Coarsest levels first; those are the ones dropped.
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> lx, ly;
  for (std::size_t i = skip; i < pts.size(); ++i) {
    const auto [h, e] = pts[i];
    if (!(h > 0.0) || !(e > 0.0) || !std::isfinite(e)) continue;
    lx.push_back(std::log(h));
    ly.push_back(std::log(e));
  }
  if (lx.size() < 3) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = lx.size();
  return fit;
}

StudyResult run_study(const ExperimentConfig& config, const StudyConfig& study) {
  switch (study.kind) {
    case StudyKind::validate: {
      StudyResult r = run_validate(config, study.tolerance);
      r.name = study.name;
      for (Row& row : r.rows) row.study = study.name;
      return r;
    }
    case StudyKind::weak_convergence:
      return run_weak(config, study);
    case StudyKind::strong_convergence:
      return run_strong(config, study);
    case StudyKind::ito:
      return run_ito(config, study);
    case StudyKind::iterint_identity:
      return run_iterint(config, study);
  }
  throw std::logic_error("run_study: unknown kind");
}

std::string csv_header() {
  return "study,level,mesh,probe,value_re,value_im,reference_re,reference_im,abs_error,seconds";
}

std::string render_csv(const std::vector<Row>& rows) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const Row& r : rows) {
    os << csv_field(r.study) << ',' << r.level << ',' << number(r.mesh) << ','
       << csv_field(r.probe) << ',' << number(r.value.real()) << ',' << number(r.value.imag())
       << ',' << number(r.reference.real()) << ',' << number(r.reference.imag()) << ','
       << number(r.abs_error) << ',' << number(r.seconds) << '\n';
  }
  return os.str();
}

std::string render_markdown(const StudyResult& result) {
  std::ostringstream os;
  os << "# " << md_cell(result.name) << " (" << study_kind_name(result.kind) << ")\n\n";
  os << "Status: " << (result.passed() ? "PASS" : "FAIL") << "\n\n";
  if (!result.checks.empty()) {
    os << "| check | residual | tolerance | kind | pass |\n|---|---|---|---|---|\n";
    for (const Check& c : result.checks) {
      os << "| " << md_cell(c.name) << " | " << short_number(c.residual) << " | "
         << short_number(c.tolerance) << " | " << md_cell(c.note) << " | "
         << (c.pass ? "yes" : "no") << " |\n";
    }
    os << '\n';
  }
  if (!result.fits.empty()) {
    os << "| probe | status | slope | intercept | points |\n|---|---|---|---|---|\n";
    for (const FitLine& f : result.fits) {
      os << "| " << md_cell(f.probe) << " | " << f.status << " | ";
      if (f.fit) {
        os << short_number(f.fit->slope) << " | " << short_number(f.fit->intercept) << " | "
           << f.fit->points;
      } else {
        os << "  |  | ";
      }
      os << " |\n";
    }
    os << '\n';
  }
  if (result.kind != StudyKind::validate) os << csv_to_markdown(render_csv(result.rows));
  return os.str();
}

std::string render_summary(const std::vector<StudyResult>& results) {
  std::ostringstream os;
  os << "| study | kind | checks | failed | status |\n|---|---|---|---|---|\n";
  for (const StudyResult& r : results) {
    const auto failed = std::count_if(r.checks.begin(), r.checks.end(),
                                      [](const Check& c) { return !c.pass; });
    os << "| " << md_cell(r.name) << " | " << study_kind_name(r.kind) << " | "
       << r.checks.size() << " | " << failed << " | " << (r.passed() ? "PASS" : "FAIL")
       << " |\n";
  }
  return os.str();
}

std::string csv_to_markdown(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::ostringstream os;
  std::size_t columns = 0;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (first) {
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw std::invalid_argument("CSV row has " + std::to_string(fields.size()) +
                                  " fields, header has " + std::to_string(columns));
    }
    os << '|';
    for (const auto& f : fields) os << ' ' << md_cell(f) << " |";
    os << '\n';
    if (first) {
      os << '|';
      for (std::size_t i = 0; i < columns; ++i) os << "---|";
      os << '\n';
      first = false;
    }
  }
  if (first) throw std::invalid_argument("CSV input is empty");
  return os.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_reports(const std::filesystem::path& dir, const std::vector<StudyResult>& results) {
  std::filesystem::create_directories(dir);
  for (const StudyResult& r : results) {
    const std::string stem = file_stem(r.name);
    write_atomically(dir / (stem + ".csv"), render_csv(r.rows));
    write_atomically(dir / (stem + ".md"), render_markdown(r));
  }
  write_atomically(dir / "summary.md", render_summary(results));
}

}  // namespace toyfock
