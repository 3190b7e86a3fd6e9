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

#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "toyfock/core_tensor.hpp"
#include "toyfock/time_grid.hpp"

namespace toyfock {

// A site vector of k̂ = C ⊕ C^d is stored as d+1 amplitudes; entry 0 is the
// vacuum amplitude λ, entries 1..d the one-particle component x.
CVec vacuum_site(std::size_t dim_k);
CVec hat(const CVec& x);  // (1, x)
CVec basis_site(std::size_t dim_k, std::size_t k);

// Bounded operator on h ⊗ k̂^⊗n, stored densely under the slowest-first
// multi-index convention (h is factor 0).
class CoupledOperator {
 public:
  CoupledOperator(CMat matrix, std::size_t dim_h, std::size_t dim_k, std::size_t arity);

  static CoupledOperator zero(std::size_t dim_h, std::size_t dim_k, std::size_t arity);
  static CoupledOperator identity(std::size_t dim_h, std::size_t dim_k, std::size_t arity);

  const CMat& matrix() const { return matrix_; }
  std::size_t dim_h() const { return dim_h_; }
  std::size_t dim_k() const { return dim_k_; }
  std::size_t arity() const { return arity_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  FactorShape shape() const { return FactorShape::coupled(dim_h_, dim_k_, arity_); }

  CoupledOperator adjoint() const;
  CoupledOperator operator*(const CoupledOperator& rhs) const;
  CoupledOperator operator+(const CoupledOperator& rhs) const;
  CoupledOperator operator-(const CoupledOperator& rhs) const;
  CoupledOperator operator*(cplx s) const;

 private:
  void check_compatible(const CoupledOperator& rhs) const;

  CMat matrix_;
  std::size_t dim_h_;
  std::size_t dim_k_;
  std::size_t arity_;
};

// coeff · (h ⊗ sites[0] ⊗ … ⊗ sites[N−1] ⊗ ω ⊗ ω ⊗ …).
struct Term {
  cplx coeff = 1.0;
  CVec h;
  std::vector<cplx> sites;  // cells × (dim_k + 1), row-major by site
};

// Finite sum of elementary tensors over the toy Fock space of a partition.
class ToyState {
 public:
  ToyState(Partition tau, std::size_t dim_h, std::size_t dim_k);

  const Partition& partition() const { return tau_; }
  std::size_t dim_h() const { return dim_h_; }
  std::size_t dim_k() const { return dim_k_; }
  std::size_t site_dim() const { return dim_k_ + 1; }
  std::size_t cells() const { return tau_.cells(); }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add_term(Term term);
  void add_product(cplx coeff, CVec h, std::span<const CVec> sites);

  std::span<const cplx> site(const Term& term, std::size_t n) const {
    return {term.sites.data() + n * site_dim(), site_dim()};
  }

  ToyState scaled(cplx s) const;

 private:
  Partition tau_;
  std::size_t dim_h_;
  std::size_t dim_k_;
  std::vector<Term> terms_;
};

// D_τ uε(f) = u ⊗ ⊗ₙ (1, f_τ(n)).
ToyState embed_exponential(const CVec& u, const StepFunction& f, const Partition& tau);

cplx inner(const ToyState& xi, const ToyState& eta);
double norm(const ToyState& xi);

// ⟨D_τ* ξ, D_σ* η⟩ for ξ over τ and η over a refinement σ of τ.
cplx cross_inner(const ToyState& coarse, const ToyState& fine);

// Applies X to h and the sites p (strictly increasing). With vacuum_window,
// every site after p₁ that is not in p is first projected onto ω. Outputs
// are expanded over the standard basis of k̂^⊗n at the sites p.
ToyState apply_site_coupled(const ToyState& xi, const CoupledOperator& x,
                            std::span<const std::size_t> sites, bool vacuum_window);

// Merges terms whose site lists are bit-identical (coeff·h summed into h).
ToyState merge_terms(const ToyState& xi);

// merge(a + s·b).
ToyState add_scaled(const ToyState& a, cplx s, const ToyState& b);

// Σ_terms |coeff|·‖h‖·∏ₙ‖sites[n]‖, an upper bound on norm(xi).
double triangle_norm_bound(const ToyState& xi);

// Accumulates terms, merging bit-identical site lists on insertion.
// Insertion order of first occurrences is preserved.
class TermAccumulator {
 public:
  TermAccumulator(Partition tau, std::size_t dim_h, std::size_t dim_k);

  void add(cplx coeff, const CVec& h, std::span<const cplx> sites);
  std::size_t size() const { return terms_.size(); }
  // Terms with h exactly zero are dropped.
  ToyState finish() &&;

 private:
  Partition tau_;
  std::size_t dim_h_;
  std::size_t dim_k_;
  std::vector<Term> terms_;
  std::unordered_multimap<std::size_t, std::size_t> index_;
};

namespace detail {

using TermSink = std::function<void(cplx coeff, const CVec& h, std::span<const cplx> sites)>;

// Core of apply_site_coupled for a single term; `matrix` acts on
// h ⊗ k̂^⊗|sites|.
void apply_to_term(const ToyState& state, const Term& term, const CMat& matrix,
                   std::span<const std::size_t> sites, bool vacuum_window,
                   const TermSink& sink);

void check_sites(std::span<const std::size_t> sites, std::size_t cells);

}  // namespace detail

}  // namespace toyfock
