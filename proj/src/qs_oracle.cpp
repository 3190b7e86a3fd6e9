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

#include "toyfock/qs_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toyfock/discrete_calculus.hpp"

namespace toyfock {

std::string_view path_name(ElementPath path) {
  switch (path) {
    case ElementPath::oracle:
      return "oracle";
    case ElementPath::discrete_apply:
      return "discrete-apply";
    case ElementPath::discrete_element:
      return "discrete-element";
  }
  return "unknown";
}

namespace detail {

cplx phi1(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx term = 0.5, sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= z / static_cast<double>(k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

}  // namespace detail

namespace {

// One cell of the union grid with everything constant on it.
struct Cell {
  double start;
  double width;
  CVec a;       // f̂ on the bra side
  CVec b;       // (Mg)^ on the ket side
  cplx w;       // weight at the cell start (continuous) or on the cell (discrete)
  cplx kappa;   // ⟨f, g⟩ on the cell, continuous weight only
  std::size_t sub = 0;  // subordinate cell index
};

class Grid {
 public:
  Grid(const IntegralSpec& spec, const StepFunction& f, const StepFunction& g) {
    if (spec.t < 0.0) throw std::invalid_argument("integration time is negative");
    if (f.dim() != spec.integrand.dim_k() || g.dim() != spec.integrand.dim_k()) {
      throw std::invalid_argument("test functions do not match the operator");
    }
    if (spec.weight != WeightKind::continuous && !spec.weight_partition) {
      throw std::invalid_argument("discrete weights need a weight partition");
    }
    double end = spec.t;
    if (spec.subordinate) {
      end = spec.subordinate->time(spec.subordinate->complete_cells(spec.t));
      limit_ = spec.subordinate->complete_cells(spec.t);
    }
    if (!(end > 0.0)) return;
    const std::vector<double> none;
    const auto& proj = spec.projection ? spec.projection->times() : none;
    const auto& wpart = spec.weight_partition ? spec.weight_partition->times() : none;
    const auto& spart = spec.subordinate ? spec.subordinate->times() : none;
    const auto grid = merge_grids({&f.breakpoints(), &g.breakpoints(), &proj, &wpart, &spart},
                                  0.0, end);
    const std::optional<StepFunction> mg =
        spec.projection ? std::optional<StepFunction>(project(g, *spec.projection))
                        : std::nullopt;
    std::vector<CVec> fc, gc;
    if (spec.weight != WeightKind::continuous) {
      fc = coarse_grain(f, *spec.weight_partition);
      gc = coarse_grain(g, *spec.weight_partition);
    }
    cplx log_w = 0.0;
    std::size_t wcell = 0;
    cplx wprod = 1.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double mid = 0.5 * (grid[i] + grid[i + 1]);
      Cell c;
      c.start = grid[i];
      c.width = grid[i + 1] - grid[i];
      const CVec fv = f.value_at(mid);
      const CVec gv = g.value_at(mid);
      c.a = hat(fv);
      c.b = hat(mg ? mg->value_at(mid) : gv);
      c.kappa = fv.dot(gv);
      if (spec.weight == WeightKind::continuous) {
        c.w = std::exp(log_w);
        log_w += c.kappa * c.width;
      } else {
        const Partition& wp = *spec.weight_partition;
        const std::size_t m = wp.cell_of(mid);
        while (wcell < m && wcell < fc.size()) {
          wprod *= 1.0 + fc[wcell].dot(gc[wcell]);
          ++wcell;
        }
        c.w = wprod;
        if (spec.weight == WeightKind::wtau) c.w *= m < wp.cells() ? wp.width(m) : 0.0;
      }
      if (spec.subordinate) c.sub = spec.subordinate->cell_of(mid);
      cells_.push_back(std::move(c));
    }
    continuous_ = spec.weight == WeightKind::continuous;
  }

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t limit() const { return limit_; }

  // ∫_cell w(s) ds.
  cplx weight_integral(const Cell& c) const {
    return continuous_ ? c.w * c.width * detail::phi1(c.kappa * c.width) : c.w * c.width;
  }

  // ∫_cell (cell_end − s) w(s) ds.
  cplx diagonal_integral(const Cell& c) const {
    return continuous_ ? c.w * c.width * c.width * detail::phi2(c.kappa * c.width)
                       : c.w * c.width * c.width * 0.5;
  }

 private:
  std::vector<Cell> cells_;
  std::size_t limit_ = 0;
  bool continuous_ = true;
};

void check_arity(const IntegralSpec& spec, std::size_t arity, const CVec& u, const CVec& v) {
  if (spec.integrand.arity() != arity) {
    throw std::invalid_argument("integrand has arity " + std::to_string(spec.integrand.arity()) +
                                ", expected " + std::to_string(arity));
  }
  if (static_cast<std::size_t>(u.size()) != spec.integrand.dim_h() ||
      static_cast<std::size_t>(v.size()) != spec.integrand.dim_h()) {
    throw std::invalid_argument("initial vectors do not match the operator");
  }
}

}  // namespace

cplx lambda1_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                     const CVec& v, const StepFunction& g) {
  check_arity(spec, 1, u, v);
  const Grid grid(spec, f, g);
  const CMat& x = spec.integrand.matrix();
  cplx total = 0.0;
  for (const Cell& c : grid.cells()) {
    const cplx bracket = kron(u, c.a).dot(x * kron(v, c.b));
    total += bracket * grid.weight_integral(c);
  }
  return total;
}

cplx lambda2_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                     const CVec& v, const StepFunction& g) {
  check_arity(spec, 2, u, v);
  const Grid grid(spec, f, g);
  const auto& cells = grid.cells();
  const std::size_t h = spec.integrand.dim_h();
  const std::size_t sd = spec.integrand.dim_k() + 1;
  const CMat& x = spec.integrand.matrix();
  // xs(k, l) = (u*⊗I) X (v⊗I) restricted to the first site indices (k, l): a sd×sd block
  // acting on the second site.
  std::vector<CMat> contracted(sd * sd, CMat::Zero(static_cast<Eigen::Index>(sd),
                                                   static_cast<Eigen::Index>(sd)));
  for (std::size_t a = 0; a < h; ++a)
    for (std::size_t c = 0; c < h; ++c) {
      const cplx uv = std::conj(u(static_cast<Eigen::Index>(a))) * v(static_cast<Eigen::Index>(c));
      if (uv == cplx(0.0)) continue;
      for (std::size_t k = 0; k < sd; ++k)
        for (std::size_t l = 0; l < sd; ++l)
          contracted[k * sd + l] +=
              uv * x.block(static_cast<Eigen::Index>((a * sd + k) * sd),
                           static_cast<Eigen::Index>((c * sd + l) * sd),
                           static_cast<Eigen::Index>(sd), static_cast<Eigen::Index>(sd));
    }
  auto site_matrix = [&](const Cell& c) {
    CMat m = CMat::Zero(static_cast<Eigen::Index>(sd), static_cast<Eigen::Index>(sd));
    for (std::size_t k = 0; k < sd; ++k)
      for (std::size_t l = 0; l < sd; ++l)
        m += std::conj(c.a(static_cast<Eigen::Index>(k))) * c.b(static_cast<Eigen::Index>(l)) *
             contracted[k * sd + l];
    return m;
  };
  const bool sub = spec.subordinate.has_value();
  // Suffix sums S = Σ_{later cells} δ_j b_j a_j^*, grouped so that subordinate mode only
  // pairs cells in strictly later τ-boxes.
  const std::size_t n = cells.size();
  std::vector<CMat> suffix(n + 1, CMat::Zero(static_cast<Eigen::Index>(sd),
                                             static_cast<Eigen::Index>(sd)));
  for (std::size_t j = n; j-- > 0;) {
    suffix[j] = suffix[j + 1] + cells[j].width * cells[j].b * cells[j].a.adjoint();
  }
  // later[i]: first cell lying in a strictly later subordinate box than cell i.
  std::vector<std::size_t> later(n, n);
  if (sub) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      j = std::max(j, i);
      while (j < n && cells[j].sub <= cells[i].sub) ++j;
      later[i] = j;
    }
  }
  cplx total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& c = cells[i];
    const CMat m = site_matrix(c);
    const std::size_t from = sub ? later[i] : i + 1;
    cplx off = (m * suffix[from]).trace();
    total += off * grid.weight_integral(c);
    if (!sub) total += c.a.dot(m * c.b) * grid.diagonal_integral(c);
  }
  return total;
}

cplx lambda_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                    const CVec& v, const StepFunction& g) {
  switch (spec.integrand.arity()) {
    case 1:
      return lambda1_element(spec, u, f, v, g);
    case 2:
      return lambda2_element(spec, u, f, v, g);
    default:
      throw std::invalid_argument("no closed form beyond arity 2");
  }
}

double gradient_norm_sq(const CoupledOperator& x, const CVec& u, const StepFunction& f,
                        double t) {
  if (x.arity() != 1) throw std::invalid_argument("gradient_norm_sq: arity-1 operator required");
  if (t < 0.0) throw std::invalid_argument("integration time is negative");
  if (!(t > 0.0)) return 0.0;
  const auto grid = merge_grids({&f.breakpoints()}, 0.0, t);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    total += (x.matrix() * kron(u, hat(f.value_at(mid)))).squaredNorm() * (grid[i + 1] - grid[i]);
  }
  return total * std::exp(l2_inner(f, f).real());
}

double norm_constant(double t) { return std::sqrt(2.0 * std::max(t, 1.0)); }

cplx ito_limit_element(const CoupledOperator& y, const CoupledOperator& x, double t,
                       const CVec& u, const StepFunction& f, const CVec& v,
                       const StepFunction& g) {
  if (x.arity() != 1 || y.arity() != 1) {
    throw std::invalid_argument("ito_limit_element: arity-1 operators required");
  }
  IntegralSpec two{triangle_left(y, x), t, std::nullopt, WeightKind::continuous, std::nullopt,
                   std::nullopt};
  cplx total = lambda2_element(two, u, f, v, g);
  two.integrand = triangle_right(y, x);
  total += lambda2_element(two, u, f, v, g);
  IntegralSpec one{y * particle_projection(x.dim_h(), x.dim_k()) * x, t, std::nullopt,
                   WeightKind::continuous, std::nullopt, std::nullopt};
  return total + lambda1_element(one, u, f, v, g);
}

}  // namespace toyfock
