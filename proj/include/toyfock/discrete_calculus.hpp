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
#include <span>
#include <vector>

#include "toyfock/core_tensor.hpp"
#include "toyfock/time_grid.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock {

// Block form of an arity-1 operator on h ⊗ k̂ = h ⊕ (h ⊗ k):
//   X = [E F; G H],  E: h→h, F: h⊗k→h, G: h→h⊗k, H: h⊗k→h⊗k.
struct NoiseBlocks {
  CMat E;
  CMat F;
  CMat G;
  CMat H;
};

CoupledOperator assemble(const NoiseBlocks& blocks, std::size_t dim_h, std::size_t dim_k);
NoiseBlocks decompose(const CoupledOperator& x);

// Fundamental noises, each tensored with I_h. Components are 0-based indices
// into k = C^d.
namespace noise {
CoupledOperator time(std::size_t dim_h, std::size_t dim_k);
CoupledOperator creation(std::size_t dim_h, std::size_t dim_k, std::size_t component = 0);
CoupledOperator annihilation(std::size_t dim_h, std::size_t dim_k, std::size_t component = 0);
CoupledOperator conservation(std::size_t dim_h, std::size_t dim_k, std::size_t row = 0,
                             std::size_t col = 0);
}  // namespace noise

// Δ⊥ (onto h ⊗ Cω) and Δ (onto h ⊗ k) on h ⊗ k̂.
CoupledOperator vacuum_projection(std::size_t dim_h, std::size_t dim_k);
CoupledOperator particle_projection(std::size_t dim_h, std::size_t dim_k);

// X_{τ,p} = (I_h ⊗ Ψ_{p₁} ⊗ … ⊗ Ψ_{pₙ}) X (same), Ψ_p = diag(√Δ_p, I_d).
struct ScaledOperator {
  CoupledOperator base;
  std::vector<std::size_t> sites;
  std::vector<double> widths;
  CMat matrix;
};

ScaledOperator scale_operator(const CoupledOperator& x, const Partition& tau,
                              std::span<const std::size_t> sites);

// Σⁿ_τ(X)_t θ: sum over strictly increasing p with τ_{pₙ+1} ≤ t of
// s̃_p(X_{τ,p}) θ, merged.
ToyState sigma_apply(const CoupledOperator& x, const Partition& tau, double t,
                     const ToyState& theta);

// Adds scale · Σⁿ_τ(X)_t θ into an accumulator.
void sigma_accumulate(TermAccumulator& acc, const CoupledOperator& x, const Partition& tau,
                      double t, const ToyState& theta, cplx scale = 1.0);

// ⟨uε(f), Σⁿ_τ(X)_t vε(g)⟩ evaluated as a scalar sum over p.
cplx sigma_element(const CoupledOperator& x, const Partition& tau, double t, const CVec& u,
                   const StepFunction& f, const CVec& v, const StepFunction& g);

// Y▷X: X on the earlier m sites, Y on the later n sites, P^ω on Y's sites
// before Y acts.
CoupledOperator triangle_left(const CoupledOperator& y, const CoupledOperator& x);
// X◁Y: Y acts first on the later sites, then X with P^ω on them.
CoupledOperator triangle_right(const CoupledOperator& x, const CoupledOperator& y);

// ⟨ε(f), Q_τ 𝔼^τ_{t₁} ε(g)⟩ = ∏ over cells ending at or before ⌊t₁⌋_τ of
// (1 + ⟨f_τ(m), g_τ(m)⟩).
cplx discrete_expectation_weight(const StepFunction& f, const StepFunction& g,
                                 const Partition& tau, double t1);

// Z^τ_t θ = Σ_{τ_{m+1} ≤ t} Δ_m s̃_m((YΔ⊥X)_{τ,m}) θ.
ToyState ito_residual_apply(const CoupledOperator& y, const CoupledOperator& x,
                            const Partition& tau, double t, const ToyState& theta);

// Σ_τ(Y)Σ_τ(X)θ − [Σ²(Y▷X) + Σ²(Y◁X) + Σ(YΔX) + Z^τ]θ, merged term-wise.
// Zero up to rounding; bound its norm with triangle_norm_bound.
ToyState ito_identity_defect(const CoupledOperator& y, const CoupledOperator& x,
                             const Partition& tau, double t, const ToyState& theta);

// Σ_{q: τ_{q+1} ≤ t} s̃_q(Y_{τ,q}) Σ_τ(X)_{τ_q} θ (arity-1 Y).
ToyState nested_left_sum(const CoupledOperator& y, const CoupledOperator& x,
                         const Partition& tau, double t, const ToyState& theta);
// Σ_{q: τ_{q+1} ≤ t} Σ_τ(X)_{τ_q} s̃_q(Y_{τ,q}) θ (arity-1 Y).
ToyState nested_right_sum(const CoupledOperator& x, const CoupledOperator& y,
                          const Partition& tau, double t, const ToyState& theta);

}  // namespace toyfock
