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

// Shared generators and a dense toy-space reference for small partitions.

#include <algorithm>
#include <numeric>
#include <vector>

#include "toyfock/core_tensor.hpp"
#include "toyfock/discrete_calculus.hpp"
#include "toyfock/rng.hpp"
#include "toyfock/time_grid.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock::testing {

inline cplx centered(SplitMix64& rng, double scale = 1.0) {
  const double re = rng.uniform() - 0.5;
  const double im = rng.uniform() - 0.5;
  return cplx(re, im) * scale;
}

inline CVec centered_vector(std::size_t n, SplitMix64& rng, double scale = 1.0) {
  CVec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = centered(rng, scale);
  return v;
}

inline CMat centered_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng,
                            double scale = 1.0) {
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = centered(rng, scale);
  return m;
}

inline CoupledOperator centered_operator(std::size_t dim_h, std::size_t dim_k,
                                         std::size_t arity, SplitMix64& rng) {
  const std::size_t n = CoupledOperator::zero(dim_h, dim_k, arity).dim();
  return CoupledOperator(centered_matrix(n, n, rng), dim_h, dim_k, arity);
}

// Random breakpoints in [0, end]; about a third of the pieces are zero.
inline StepFunction random_step(std::size_t dim_k, double end, std::size_t pieces,
                                SplitMix64& rng, double scale = 1.0) {
  std::vector<double> bp{0.0};
  for (std::size_t i = 0; i + 1 < pieces; ++i) bp.push_back(rng.uniform() * end);
  bp.push_back(end);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<CVec> vals;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (rng.below(3) == 0) {
      vals.push_back(CVec::Zero(static_cast<Eigen::Index>(dim_k)));
    } else {
      vals.push_back(centered_vector(dim_k, rng, scale));
    }
  }
  return StepFunction(dim_k, bp, vals);
}

inline Partition random_partition(std::size_t cells, double horizon, SplitMix64& rng) {
  std::vector<double> t{0.0};
  std::vector<double> inner;
  for (std::size_t i = 0; i + 1 < cells; ++i) inner.push_back(0.05 + 0.9 * rng.uniform());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x * horizon > t.back() + 1e-3) t.push_back(x * horizon);
  }
  t.push_back(horizon);
  return Partition(t);
}

inline ToyState random_state(const Partition& tau, std::size_t dim_h, std::size_t dim_k,
                             std::size_t terms, SplitMix64& rng) {
  ToyState out(tau, dim_h, dim_k);
  for (std::size_t i = 0; i < terms; ++i) {
    std::vector<CVec> sites;
    for (std::size_t n = 0; n < tau.cells(); ++n) {
      CVec s = centered_vector(dim_k + 1, rng);
      s(0) += 1.0;
      sites.push_back(s);
    }
    out.add_product(centered(rng), centered_vector(dim_h, rng), sites);
  }
  return out;
}

// Full vector in h ⊗ k̂^⊗N.
inline CVec to_dense(const ToyState& xi) {
  std::size_t dim = xi.dim_h();
  for (std::size_t n = 0; n < xi.cells(); ++n) dim *= xi.site_dim();
  CVec out = CVec::Zero(static_cast<Eigen::Index>(dim));
  for (const Term& t : xi.terms()) {
    CVec v = t.h * t.coeff;
    for (std::size_t n = 0; n < xi.cells(); ++n) {
      auto s = xi.site(t, n);
      CVec sv = Eigen::Map<const CVec>(s.data(), static_cast<Eigen::Index>(s.size()));
      v = kron(v, sv);
    }
    out += v;
  }
  return out;
}

// s̃_p(m) on the full space, built from kron and a factor permutation.
inline CMat dense_site_operator(const CMat& m, std::size_t dim_h, std::size_t dim_k,
                                std::size_t cells, const std::vector<std::size_t>& p,
                                bool window) {
  const std::size_t sd = dim_k + 1;
  CMat pw = CMat::Zero(static_cast<Eigen::Index>(sd), static_cast<Eigen::Index>(sd));
  pw(0, 0) = 1.0;
  CMat big = m;
  std::vector<std::size_t> order{0};
  for (std::size_t k = 0; k < p.size(); ++k) order.push_back(1 + p[k]);
  for (std::size_t q = 0; q < cells; ++q) {
    if (std::find(p.begin(), p.end(), q) != p.end()) continue;
    big = kron(big, (window && q > p[0]) ? pw : identity(sd));
    order.push_back(1 + q);
  }
  // order[k] = natural factor held at input position k; invert for the output order.
  std::vector<std::size_t> perm(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) perm[order[k]] = k;
  FactorShape shape = FactorShape::coupled(dim_h, dim_k, cells);
  return permute_factors(big, shape, perm);
}

inline void for_each_increasing(std::size_t n, std::size_t limit,
                                const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (n == 0 || n > limit) return;
  std::vector<std::size_t> p(n);
  std::vector<bool> pick(limit, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  // prev_permutation over the selection mask gives lexicographic subsets.
  do {
    std::size_t k = 0;
    for (std::size_t i = 0; i < limit; ++i)
      if (pick[i]) p[k++] = i;
    fn(p);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

// Σⁿ_τ(X)_t as a dense matrix; scaling done entrywise here, independent of scale_operator.
inline CMat dense_sigma(const CoupledOperator& x, const Partition& tau, double t) {
  const std::size_t sd = x.dim_k() + 1;
  std::size_t dim = x.dim_h();
  for (std::size_t n = 0; n < tau.cells(); ++n) dim *= sd;
  CMat out = CMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::size_t limit = 0;
  while (limit < tau.cells() && tau.time(limit + 1) <= t + 1e-12) ++limit;
  for_each_increasing(x.arity(), limit, [&](const std::vector<std::size_t>& p) {
    CMat psi = identity(x.dim_h());
    for (std::size_t q : p) {
      CMat d = identity(sd);
      d(0, 0) = std::sqrt(tau.width(q));
      psi = kron(psi, d);
    }
    out += dense_site_operator(psi * x.matrix() * psi, x.dim_h(), x.dim_k(), tau.cells(), p,
                               true);
  });
  return out;
}

}  // namespace toyfock::testing
