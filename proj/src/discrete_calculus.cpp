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

#include "toyfock/discrete_calculus.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace toyfock {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Calls fn(p) for every strictly increasing p ∈ {0..limit−1}^n, in
// lexicographic order.
void for_each_increasing(std::size_t n, std::size_t limit,
                         const std::function<void(std::span<const std::size_t>)>& fn) {
  if (n == 0 || n > limit) return;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  while (true) {
    fn(p);
    std::size_t m = n;
    while (m > 0 && p[m - 1] == limit - n + (m - 1)) --m;
    if (m == 0) return;
    ++p[m - 1];
    for (std::size_t j = m; j < n; ++j) p[j] = p[j - 1] + 1;
  }
}

CMat site_projector(std::size_t dim_k, std::size_t k) {
  CMat p = CMat::Zero(static_cast<Eigen::Index>(dim_k + 1), static_cast<Eigen::Index>(dim_k + 1));
  p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return p;
}

void check_state(const ToyState& theta, const CoupledOperator& x, const Partition& tau) {
  if (!(theta.partition() == tau)) {
    throw std::invalid_argument("state does not live on the given partition");
  }
  if (theta.dim_h() != x.dim_h() || theta.dim_k() != x.dim_k()) {
    throw std::invalid_argument("operator does not match the state dimensions");
  }
}

void check_time(const Partition& tau, double t) {
  if (t > tau.horizon() + kTimeTolerance) {
    throw std::invalid_argument("integration time lies beyond the horizon");
  }
  if (t < 0.0) throw std::invalid_argument("integration time is negative");
}

}  // namespace

CoupledOperator assemble(const NoiseBlocks& b, std::size_t dim_h, std::size_t dim_k) {
  const auto h = static_cast<Eigen::Index>(dim_h);
  const auto d = static_cast<Eigen::Index>(dim_k);
  if (b.E.rows() != h || b.E.cols() != h || b.F.rows() != h || b.F.cols() != h * d ||
      b.G.rows() != h * d || b.G.cols() != h || b.H.rows() != h * d || b.H.cols() != h * d) {
    throw std::invalid_argument("assemble: block shapes do not match dim_h/dim_k");
  }
  const Eigen::Index s = d + 1;
  CMat x = CMat::Zero(h * s, h * s);
  for (Eigen::Index a = 0; a < h; ++a) {
    for (Eigen::Index c = 0; c < h; ++c) {
      x(a * s, c * s) = b.E(a, c);
      for (Eigen::Index j = 0; j < d; ++j) {
        x(a * s, c * s + 1 + j) = b.F(a, c * d + j);
        x(a * s + 1 + j, c * s) = b.G(a * d + j, c);
        for (Eigen::Index i = 0; i < d; ++i) {
          x(a * s + 1 + i, c * s + 1 + j) = b.H(a * d + i, c * d + j);
        }
      }
    }
  }
  return CoupledOperator(std::move(x), dim_h, dim_k, 1);
}

NoiseBlocks decompose(const CoupledOperator& x) {
  if (x.arity() != 1) throw std::invalid_argument("decompose: arity-1 operator required");
  const auto h = static_cast<Eigen::Index>(x.dim_h());
  const auto d = static_cast<Eigen::Index>(x.dim_k());
  const Eigen::Index s = d + 1;
  NoiseBlocks b{CMat::Zero(h, h), CMat::Zero(h, h * d), CMat::Zero(h * d, h),
                CMat::Zero(h * d, h * d)};
  const CMat& m = x.matrix();
  for (Eigen::Index a = 0; a < h; ++a) {
    for (Eigen::Index c = 0; c < h; ++c) {
      b.E(a, c) = m(a * s, c * s);
      for (Eigen::Index j = 0; j < d; ++j) {
        b.F(a, c * d + j) = m(a * s, c * s + 1 + j);
        b.G(a * d + j, c) = m(a * s + 1 + j, c * s);
        for (Eigen::Index i = 0; i < d; ++i) {
          b.H(a * d + i, c * d + j) = m(a * s + 1 + i, c * s + 1 + j);
        }
      }
    }
  }
  return b;
}

namespace noise {

namespace {
CoupledOperator local(std::size_t dim_h, std::size_t dim_k, std::size_t row, std::size_t col) {
  if (row > dim_k || col > dim_k) throw std::invalid_argument("noise: component out of range");
  CMat unit = CMat::Zero(static_cast<Eigen::Index>(dim_k + 1),
                         static_cast<Eigen::Index>(dim_k + 1));
  unit(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0;
  return CoupledOperator(kron(identity(dim_h), unit), dim_h, dim_k, 1);
}
}  // namespace

CoupledOperator time(std::size_t dim_h, std::size_t dim_k) { return local(dim_h, dim_k, 0, 0); }

CoupledOperator creation(std::size_t dim_h, std::size_t dim_k, std::size_t component) {
  return local(dim_h, dim_k, component + 1, 0);
}

CoupledOperator annihilation(std::size_t dim_h, std::size_t dim_k, std::size_t component) {
  return local(dim_h, dim_k, 0, component + 1);
}

CoupledOperator conservation(std::size_t dim_h, std::size_t dim_k, std::size_t row,
                             std::size_t col) {
  return local(dim_h, dim_k, row + 1, col + 1);
}

}  // namespace noise

CoupledOperator vacuum_projection(std::size_t dim_h, std::size_t dim_k) {
  return CoupledOperator(kron(identity(dim_h), site_projector(dim_k, 0)), dim_h, dim_k, 1);
}

CoupledOperator particle_projection(std::size_t dim_h, std::size_t dim_k) {
  return CoupledOperator::identity(dim_h, dim_k, 1) - vacuum_projection(dim_h, dim_k);
}

ScaledOperator scale_operator(const CoupledOperator& x, const Partition& tau,
                              std::span<const std::size_t> sites) {
  if (sites.size() != x.arity()) {
    throw std::invalid_argument("scale_operator: number of sites != operator arity");
  }
  detail::check_sites(sites, tau.cells());
  ScaledOperator out{x, {sites.begin(), sites.end()}, {}, {}};
  for (std::size_t p : sites) out.widths.push_back(tau.width(p));
  const std::size_t sd = x.dim_k() + 1;
  const std::size_t block = ipow(sd, x.arity());
  std::vector<double> psi(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    std::size_t rem = i % block;
    double s = 1.0;
    for (std::size_t m = x.arity(); m-- > 0;) {
      if (rem % sd == 0) s *= std::sqrt(out.widths[m]);
      rem /= sd;
    }
    psi[i] = s;
  }
  out.matrix = x.matrix();
  for (Eigen::Index r = 0; r < out.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.matrix.cols(); ++c) {
      out.matrix(r, c) *= psi[static_cast<std::size_t>(r)] * psi[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

void sigma_accumulate(TermAccumulator& acc, const CoupledOperator& x, const Partition& tau,
                      double t, const ToyState& theta, cplx scale) {
  check_time(tau, t);
  check_state(theta, x, tau);
  const std::size_t limit = tau.complete_cells(t);
  for_each_increasing(x.arity(), limit, [&](std::span<const std::size_t> p) {
    const CMat m = scale_operator(x, tau, p).matrix * scale;
    for (const Term& term : theta.terms()) {
      detail::apply_to_term(theta, term, m, p, true,
                            [&](cplx c, const CVec& h, std::span<const cplx> s) {
                              acc.add(c, h, s);
                            });
    }
  });
}

ToyState sigma_apply(const CoupledOperator& x, const Partition& tau, double t,
                     const ToyState& theta) {
  TermAccumulator acc(tau, theta.dim_h(), theta.dim_k());
  sigma_accumulate(acc, x, tau, t, theta);
  return std::move(acc).finish();
}

cplx sigma_element(const CoupledOperator& x, const Partition& tau, double t, const CVec& u,
                   const StepFunction& f, const CVec& v, const StepFunction& g) {
  check_time(tau, t);
  if (static_cast<std::size_t>(u.size()) != x.dim_h() ||
      static_cast<std::size_t>(v.size()) != x.dim_h() || f.dim() != x.dim_k() ||
      g.dim() != x.dim_k()) {
    throw std::invalid_argument("sigma_element: probe dimensions do not match the operator");
  }
  const auto fc = coarse_grain(f, tau);
  const auto gc = coarse_grain(g, tau);
  const std::size_t cells = tau.cells();
  // Ψ_p f̂_τ(p) = (√Δ_p, f_τ(p)).
  std::vector<CVec> pf(cells), pg(cells);
  std::vector<cplx> prefix(cells + 1);
  prefix[0] = 1.0;
  for (std::size_t n = 0; n < cells; ++n) {
    const double root = std::sqrt(tau.width(n));
    pf[n] = hat(fc[n]);
    pf[n](0) = root;
    pg[n] = hat(gc[n]);
    pg[n](0) = root;
    prefix[n + 1] = prefix[n] * (1.0 + fc[n].dot(gc[n]));
  }
  cplx total = 0.0;
  for_each_increasing(x.arity(), tau.complete_cells(t), [&](std::span<const std::size_t> p) {
    CVec a = u;
    CVec b = v;
    for (std::size_t q : p) {
      a = kron(a, pf[q]);
      b = kron(b, pg[q]);
    }
    total += prefix[p[0]] * a.dot(x.matrix() * b);
  });
  return total;
}

namespace {

// σ̃_{n,m}(Y ⊗ I_{k̂^⊗m}): Y moved onto the last n of m+n sites.
CMat shifted_late(const CoupledOperator& y, std::size_t m) {
  const std::size_t n = y.arity();
  const std::size_t sd = y.dim_k() + 1;
  const CMat padded = kron(y.matrix(), identity(ipow(sd, m)));
  FactorShape shape = FactorShape::coupled(y.dim_h(), y.dim_k(), n + m);
  std::vector<std::size_t> perm{0};
  for (std::size_t k = 0; k < m; ++k) perm.push_back(n + 1 + k);
  for (std::size_t k = 0; k < n; ++k) perm.push_back(1 + k);
  return permute_factors(padded, shape, perm);
}

CMat vacuum_padded(const CoupledOperator& x, std::size_t n) {
  CMat pw = site_projector(x.dim_k(), 0);
  CMat tail = identity(1);
  for (std::size_t k = 0; k < n; ++k) tail = kron(tail, pw);
  return kron(x.matrix(), tail);
}

void check_pair(const CoupledOperator& a, const CoupledOperator& b) {
  if (a.dim_h() != b.dim_h() || a.dim_k() != b.dim_k()) {
    throw std::invalid_argument("triangle product: dimension mismatch");
  }
}

}  // namespace

CoupledOperator triangle_left(const CoupledOperator& y, const CoupledOperator& x) {
  check_pair(y, x);
  const CMat m = shifted_late(y, x.arity()) * vacuum_padded(x, y.arity());
  return CoupledOperator(m, x.dim_h(), x.dim_k(), x.arity() + y.arity());
}

CoupledOperator triangle_right(const CoupledOperator& x, const CoupledOperator& y) {
  check_pair(x, y);
  const CMat m = vacuum_padded(x, y.arity()) * shifted_late(y, x.arity());
  return CoupledOperator(m, x.dim_h(), x.dim_k(), x.arity() + y.arity());
}

cplx discrete_expectation_weight(const StepFunction& f, const StepFunction& g,
                                 const Partition& tau, double t1) {
  const auto fc = coarse_grain(f, tau);
  const auto gc = coarse_grain(g, tau);
  const std::size_t upto = tau.cell_of(t1);
  cplx w = 1.0;
  for (std::size_t m = 0; m < upto; ++m) w *= 1.0 + fc[m].dot(gc[m]);
  return w;
}

namespace {

void residual_accumulate(TermAccumulator& acc, const CoupledOperator& y,
                         const CoupledOperator& x, const Partition& tau, double t,
                         const ToyState& theta, cplx scale) {
  check_time(tau, t);
  check_state(theta, x, tau);
  if (x.arity() != 1 || y.arity() != 1) {
    throw std::invalid_argument("ito_residual_apply: arity-1 operators required");
  }
  const CoupledOperator v = y * vacuum_projection(x.dim_h(), x.dim_k()) * x;
  const std::size_t limit = tau.complete_cells(t);
  for (std::size_t m = 0; m < limit; ++m) {
    const std::size_t site[1] = {m};
    const CMat mat = scale_operator(v, tau, site).matrix * (scale * tau.width(m));
    for (const Term& term : theta.terms()) {
      detail::apply_to_term(theta, term, mat, site, true,
                            [&](cplx c, const CVec& h, std::span<const cplx> s) {
                              acc.add(c, h, s);
                            });
    }
  }
}

}  // namespace

ToyState ito_residual_apply(const CoupledOperator& y, const CoupledOperator& x,
                            const Partition& tau, double t, const ToyState& theta) {
  TermAccumulator acc(tau, theta.dim_h(), theta.dim_k());
  residual_accumulate(acc, y, x, tau, t, theta, 1.0);
  return std::move(acc).finish();
}

ToyState ito_identity_defect(const CoupledOperator& y, const CoupledOperator& x,
                             const Partition& tau, double t, const ToyState& theta) {
  if (x.arity() != 1 || y.arity() != 1) {
    throw std::invalid_argument("ito_identity_defect: arity-1 operators required");
  }
  TermAccumulator acc(tau, theta.dim_h(), theta.dim_k());
  const ToyState sx = sigma_apply(x, tau, t, theta);
  sigma_accumulate(acc, y, tau, t, sx, 1.0);
  sigma_accumulate(acc, triangle_left(y, x), tau, t, theta, -1.0);
  sigma_accumulate(acc, triangle_right(y, x), tau, t, theta, -1.0);
  sigma_accumulate(acc, y * particle_projection(x.dim_h(), x.dim_k()) * x, tau, t, theta, -1.0);
  residual_accumulate(acc, y, x, tau, t, theta, -1.0);
  return std::move(acc).finish();
}

ToyState nested_left_sum(const CoupledOperator& y, const CoupledOperator& x,
                         const Partition& tau, double t, const ToyState& theta) {
  check_time(tau, t);
  if (y.arity() != 1) throw std::invalid_argument("nested_left_sum: arity-1 Y required");
  TermAccumulator acc(tau, theta.dim_h(), theta.dim_k());
  const std::size_t limit = tau.complete_cells(t);
  for (std::size_t q = 0; q < limit; ++q) {
    const ToyState inner_sum = sigma_apply(x, tau, tau.time(q), theta);
    const std::size_t site[1] = {q};
    const CMat yq = scale_operator(y, tau, site).matrix;
    for (const Term& term : inner_sum.terms()) {
      detail::apply_to_term(inner_sum, term, yq, site, true,
                            [&](cplx c, const CVec& h, std::span<const cplx> s) {
                              acc.add(c, h, s);
                            });
    }
  }
  return std::move(acc).finish();
}

ToyState nested_right_sum(const CoupledOperator& x, const CoupledOperator& y,
                          const Partition& tau, double t, const ToyState& theta) {
  check_time(tau, t);
  if (y.arity() != 1) throw std::invalid_argument("nested_right_sum: arity-1 Y required");
  TermAccumulator acc(tau, theta.dim_h(), theta.dim_k());
  const std::size_t limit = tau.complete_cells(t);
  for (std::size_t q = 0; q < limit; ++q) {
    const std::size_t site[1] = {q};
    const ScaledOperator yq = scale_operator(y, tau, site);
    const ToyState moved = apply_site_coupled(
        theta, CoupledOperator(yq.matrix, y.dim_h(), y.dim_k(), 1), site, true);
    sigma_accumulate(acc, x, tau, tau.time(q), moved, 1.0);
  }
  return std::move(acc).finish();
}

}  // namespace toyfock
