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

// Invariant suite run by `toyfock validate`.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "toyfock/discrete_calculus.hpp"
#include "toyfock/experiment.hpp"
#include "toyfock/qs_oracle.hpp"
#include "toyfock/rng.hpp"

namespace toyfock {

namespace {

constexpr int kTrials = 8;

cplx centered(SplitMix64& rng) {
  const double re = rng.uniform() - 0.5;
  const double im = rng.uniform() - 0.5;
  return {re, im};
}

CVec centered_vector(std::size_t n, SplitMix64& rng) {
  CVec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = centered(rng);
  return v;
}

CMat centered_matrix(std::size_t n, SplitMix64& rng) {
  CMat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = centered(rng);
  return m;
}

CoupledOperator centered_operator(std::size_t h, std::size_t d, std::size_t arity,
                                  SplitMix64& rng) {
  const std::size_t n = CoupledOperator::zero(h, d, arity).dim();
  return CoupledOperator(centered_matrix(n, rng), h, d, arity);
}

StepFunction random_step(std::size_t d, double end, SplitMix64& rng) {
  std::vector<double> bp{0.0};
  for (int i = 0; i < 3; ++i) bp.push_back(rng.uniform() * end);
  bp.push_back(end);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(),
                       [](double a, double b) { return b - a < 1e-9; }),
           bp.end());
  std::vector<CVec> vals;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) vals.push_back(centered_vector(d, rng) * 2.0);
  return StepFunction(d, bp, vals);
}

Partition random_partition(std::size_t cells, double horizon, SplitMix64& rng) {
  std::vector<double> inner;
  for (std::size_t i = 0; i + 1 < cells; ++i) inner.push_back(0.02 + 0.96 * rng.uniform());
  std::sort(inner.begin(), inner.end());
  std::vector<double> t{0.0};
  for (double x : inner) {
    if (x * horizon > t.back() + 1e-3 * horizon) t.push_back(x * horizon);
  }
  t.push_back(horizon);
  return Partition(t);
}

ToyState random_state(const Partition& tau, std::size_t h, std::size_t d, std::size_t terms,
                      SplitMix64& rng) {
  ToyState out(tau, h, d);
  for (std::size_t i = 0; i < terms; ++i) {
    std::vector<CVec> sites;
    for (std::size_t n = 0; n < tau.cells(); ++n) {
      CVec s = centered_vector(d + 1, rng);
      s(0) += 1.0;
      sites.push_back(s);
    }
    out.add_product(centered(rng), centered_vector(h, rng), sites);
  }
  return out;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Context {
  std::size_t h;
  std::size_t d;
  double horizon;
  SplitMix64 rng;
};

using CheckFn = std::function<double(Context&)>;

struct CheckDef {
  const char* name;
  bool inequality;  // bounds are checked at tolerance 0
  CheckFn fn;
};

std::vector<CheckDef> checks() {
  return {
      {"kron mixed-product rule", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const CMat a = centered_matrix(c.d + 1, c.rng), b = centered_matrix(c.h, c.rng);
           const CMat x = centered_matrix(c.d + 1, c.rng), y = centered_matrix(c.h, c.rng);
           worst = std::max(worst, max_abs_diff(kron(a, b) * kron(x, y), kron(CMat(a * x), CMat(b * y))));
         }
         return worst;
       }},
      {"permute_factors inverse round trip", false,
       [](Context& c) {
         const FactorShape shape = FactorShape::coupled(c.h, c.d, 3);
         const std::array<std::size_t, 4> perm{0, 3, 1, 2};
         const CMat a = centered_matrix(shape.total(), c.rng);
         const CMat back = permute_factors(permute_factors(a, shape, perm),
                                           permuted_shape(shape, perm), inverse_permutation(perm));
         return max_abs_diff(back, a);
       }},
      {"adjoint reverses products", false,
       [](Context& c) {
         const CMat a = centered_matrix(c.h * (c.d + 1), c.rng);
         const CMat b = centered_matrix(c.h * (c.d + 1), c.rng);
         return max_abs_diff(adjoint(a * b), adjoint(b) * adjoint(a));
       }},
      {"projection is idempotent", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const Partition tau = random_partition(5, c.horizon, c.rng);
           const StepFunction p = project(f, tau);
           worst = std::max(worst, l2_norm(project(p, tau) - p));
         }
         return worst;
       }},
      {"projection is a contraction", true,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const Partition tau = random_partition(5, c.horizon, c.rng);
           worst = std::max(worst, l2_norm(project(f, tau)) - l2_norm(f) - 1e-14);
         }
         return std::max(worst, 0.0);
       }},
      {"embedding inner product is the cell product", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(1 + c.rng.below(32), c.horizon, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const StepFunction g = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng), v = centered_vector(c.h, c.rng);
           const auto fc = coarse_grain(f, tau), gc = coarse_grain(g, tau);
           cplx prod = u.dot(v);
           for (std::size_t n = 0; n < tau.cells(); ++n) prod *= 1.0 + fc[n].dot(gc[n]);
           worst = std::max(worst, rel(inner(embed_exponential(u, f, tau),
                                             embed_exponential(v, g, tau)),
                                       prod));
         }
         return worst;
       }},
      {"toy norm never exceeds the Fock norm", true,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(1 + c.rng.below(32), c.horizon, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng);
           const double toy = std::pow(norm(embed_exponential(u, f, tau)), 2);
           const double fock = u.squaredNorm() * std::exp(std::pow(l2_norm(f), 2));
           worst = std::max(worst, (toy - fock) / fock - 1e-13);
         }
         return std::max(worst, 0.0);
       }},
      {"cross_inner on equal partitions equals inner", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(6, c.horizon, c.rng);
           const ToyState a = random_state(tau, c.h, c.d, 3, c.rng);
           const ToyState b = random_state(tau, c.h, c.d, 3, c.rng);
           worst = std::max(worst, rel(cross_inner(a, b), inner(a, b)));
         }
         return worst;
       }},
      {"cross_inner on aligned exponentials", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(5, c.horizon, c.rng);
           std::vector<double> t = tau.times();
           for (std::size_t n = 0; n < tau.cells(); ++n) t.push_back(tau.time(n) + 0.5 * tau.width(n));
           std::sort(t.begin(), t.end());
           const Partition sigma(t);
           const StepFunction f = project(random_step(c.d, c.horizon, c.rng), tau);
           const StepFunction g = project(random_step(c.d, c.horizon, c.rng), tau);
           const CVec u = centered_vector(c.h, c.rng), v = centered_vector(c.h, c.rng);
           const ToyState xi = embed_exponential(u, f, tau);
           worst = std::max(worst, rel(cross_inner(xi, embed_exponential(v, g, sigma)),
                                       inner(xi, embed_exponential(v, g, tau))));
         }
         return worst;
       }},
      {"merging preserves inner products", false,
       [](Context& c) {
         const Partition tau = random_partition(6, c.horizon, c.rng);
         ToyState a = random_state(tau, c.h, c.d, 3, c.rng);
         const ToyState copy = a;
         for (const Term& t : copy.terms()) a.add_term(t);
         const ToyState probe = random_state(tau, c.h, c.d, 2, c.rng);
         return rel(inner(probe, merge_terms(a)), inner(probe, a));
       }},
      {"site application is multiplicative", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(5, c.horizon, c.rng);
           const ToyState xi = random_state(tau, c.h, c.d, 2, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const CoupledOperator y = centered_operator(c.h, c.d, 1, c.rng);
           const std::size_t s[1] = {c.rng.below(tau.cells())};
           const ToyState lhs = apply_site_coupled(apply_site_coupled(xi, x, s, true), y, s, true);
           const ToyState rhs = apply_site_coupled(xi, y * x, s, true);
           worst = std::max(worst, norm(add_scaled(lhs, -1.0, rhs)) / std::max(1.0, norm(rhs)));
         }
         return worst;
       }},
      {"equal-site product splits into YΔX and Δ·YΔ⊥X", false,
       [](Context& c) {
         double worst = 0.0;
         const Partition tau = random_partition(6, c.horizon, c.rng);
         for (int i = 0; i < kTrials; ++i) {
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const CoupledOperator y = centered_operator(c.h, c.d, 1, c.rng);
           const std::size_t m[1] = {c.rng.below(tau.cells())};
           const CMat lhs = scale_operator(y, tau, m).matrix * scale_operator(x, tau, m).matrix;
           const CMat rhs = scale_operator(y * particle_projection(c.h, c.d) * x, tau, m).matrix +
                            scale_operator(y * vacuum_projection(c.h, c.d) * x, tau, m).matrix *
                                tau.width(m[0]);
           worst = std::max(worst, max_abs_diff(lhs, rhs));
         }
         return worst;
       }},
      {"sigma_element matches the apply path", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const std::size_t arity = 1 + static_cast<std::size_t>(i % 2);
           const Partition tau = random_partition(4 + c.rng.below(8), c.horizon, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, arity, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const StepFunction g = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng), v = centered_vector(c.h, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           const cplx a = sigma_element(x, tau, t, u, f, v, g);
           const cplx b = inner(embed_exponential(u, f, tau),
                                sigma_apply(x, tau, t, embed_exponential(v, g, tau)));
           worst = std::max(worst, rel(a, b));
         }
         return worst;
       }},
      {"sigma_element adjoint symmetry", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(8, c.horizon, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const StepFunction g = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng), v = centered_vector(c.h, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           worst = std::max(worst, rel(sigma_element(x.adjoint(), tau, t, v, g, u, f),
                                       std::conj(sigma_element(x, tau, t, u, f, v, g))));
         }
         return worst;
       }},
      {"exact discrete product identity", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const Partition tau = random_partition(4 + c.rng.below(12), c.horizon, c.rng);
           const ToyState theta = random_state(tau, c.h, c.d, 1, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const CoupledOperator y = centered_operator(c.h, c.d, 1, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           worst = std::max(worst, triangle_norm_bound(ito_identity_defect(y, x, tau, t, theta)));
         }
         return worst;
       }},
      {"nested sums equal double sums", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials / 2; ++i) {
           const Partition tau = random_partition(6, c.horizon, c.rng);
           const ToyState theta = random_state(tau, c.h, c.d, 1, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const CoupledOperator y = centered_operator(c.h, c.d, 1, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           const ToyState a = sigma_apply(triangle_left(y, x), tau, t, theta);
           const ToyState b = sigma_apply(triangle_right(x, y), tau, t, theta);
           worst = std::max({worst,
                             norm(add_scaled(nested_left_sum(y, x, tau, t, theta), -1.0, a)) /
                                 std::max(1.0, norm(a)),
                             norm(add_scaled(nested_right_sum(x, y, tau, t, theta), -1.0, b)) /
                                 std::max(1.0, norm(b))});
         }
         return worst;
       }},
      {"discrete sum equals subordinate integral", false,
       [](Context& c) {
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const std::size_t arity = 1 + static_cast<std::size_t>(i % 2);
           const Partition tau = random_partition(4 + c.rng.below(16), c.horizon, c.rng);
           const CoupledOperator x = centered_operator(c.h, c.d, arity, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const StepFunction g = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng), v = centered_vector(c.h, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           const IntegralSpec spec{x, t, tau, WeightKind::discrete, tau, tau};
           worst = std::max(worst, rel(lambda_element(spec, u, f, v, g),
                                       sigma_element(x, tau, t, u, f, v, g)));
         }
         return worst;
       }},
      {"continuous weight matches quadrature", false,
       [](Context& c) {
         // ∫₀ᵗ exp(∫₀ˢ⟨f,g⟩) ds by composite Simpson on each piece of the union grid.
         double worst = 0.0;
         for (int i = 0; i < kTrials; ++i) {
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const StepFunction g = random_step(c.d, c.horizon, c.rng);
           const double t = c.rng.uniform() * c.horizon;
           const auto grid = merge_grids({&f.breakpoints(), &g.breakpoints()}, 0.0, t);
           cplx quad = 0.0;
           for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
             const int panels = 1024;
             const double a = grid[k], h = (grid[k + 1] - a) / panels;
             cplx acc = 0.0;
             for (int j = 0; j <= panels; ++j) {
               const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
               acc += w * std::exp(cumulative_inner(f, g, a + j * h));
             }
             quad += acc * h / 3.0;
           }
           const CVec u = CVec::Unit(static_cast<Eigen::Index>(c.h), 0);
           const IntegralSpec spec{noise::time(c.h, c.d), t, std::nullopt, WeightKind::continuous,
                                   std::nullopt, std::nullopt};
           worst = std::max(worst, rel(lambda1_element(spec, u, f, u, g), quad));
         }
         return worst;
       }},
      {"norm bounded by c_t times the gradient", true,
       [](Context& c) {
         double worst = 0.0;
         const Partition ref = Partition::dyadic(7, c.horizon);
         for (int i = 0; i < kTrials / 2; ++i) {
           const CoupledOperator x = centered_operator(c.h, c.d, 1, c.rng);
           const StepFunction f = random_step(c.d, c.horizon, c.rng);
           const CVec u = centered_vector(c.h, c.rng);
           const double t = c.horizon * (0.25 + 0.75 * c.rng.uniform());
           const double lhs = norm(sigma_apply(x, ref, t, embed_exponential(u, f, ref)));
           const double rhs = norm_constant(t) * std::sqrt(gradient_norm_sq(x, u, f, t));
           worst = std::max(worst, lhs - rhs);
         }
         return std::max(worst, 0.0);
       }},
  };
}

}  // namespace

StudyResult run_validate(const ExperimentConfig& config, std::optional<double> tolerance) {
  StudyResult out;
  out.name = "validate";
  out.kind = StudyKind::validate;
  const double tol = tolerance.value_or(config.tolerance);
  Context ctx{config.dim_h, config.dim_k, config.horizon, SplitMix64(config.seed)};
  for (const auto& def : checks()) {
    Check c;
    c.name = def.name;
    c.tolerance = def.inequality ? 0.0 : tol;
    c.note = def.inequality ? "bound" : "identity";
    try {
      c.residual = def.fn(ctx);
      c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
    } catch (const std::exception& e) {
      c.residual = std::nan("");
      c.pass = false;
      c.note = std::string("exception: ") + e.what();
    }
    Row row;
    row.study = out.name;
    row.probe = c.name;
    row.value = c.residual;
    row.reference = c.tolerance;
    row.abs_error = c.residual;
    out.rows.push_back(row);
    out.checks.push_back(std::move(c));
  }
  return out;
}

}  // namespace toyfock
