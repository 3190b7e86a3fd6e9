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

#include <optional>
#include <string_view>

#include "toyfock/core_tensor.hpp"
#include "toyfock/time_grid.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock {

// Scalar weight multiplying the integrand at the first time t₁:
//   continuous  exp(∫₀^{t₁}⟨f,g⟩)
//   discrete    ∏_{m < cell(t₁)} (1 + ⟨f_τ(m), g_τ(m)⟩)
//   wtau        discrete weight times the width of t₁'s cell
enum class WeightKind { continuous, discrete, wtau };

struct IntegralSpec {
  CoupledOperator integrand;
  double t = 0.0;
  std::optional<Partition> projection;        // M = P_τ on the ket function; identity if unset
  WeightKind weight = WeightKind::continuous;
  std::optional<Partition> weight_partition;  // required for discrete and wtau
  std::optional<Partition> subordinate;       // restrict to the off-diagonal τ-boxes
};

enum class ElementPath { oracle, discrete_apply, discrete_element };

std::string_view path_name(ElementPath path);

struct ElementReport {
  cplx value;
  std::optional<double> mesh;
  ElementPath path = ElementPath::oracle;
  double seconds = 0.0;
};

// ⟨uε(f), Λ(X)_t vε(g)⟩ for arity-1 X.
cplx lambda1_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                     const CVec& v, const StepFunction& g);

// Double integral over t₁ < t₂ ≤ t for arity-2 X; factor 1 of X carries t₁.
cplx lambda2_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                     const CVec& v, const StepFunction& g);

// Dispatches on the integrand arity.
cplx lambda_element(const IntegralSpec& spec, const CVec& u, const StepFunction& f,
                    const CVec& v, const StepFunction& g);

// ∫₀ᵗ ‖X[u⊗f̂(s)]‖² ds · ‖ε(f)‖².
double gradient_norm_sq(const CoupledOperator& x, const CVec& u, const StepFunction& f,
                        double t);

// c_t = √(2 max{t, 1}).
double norm_constant(double t);

// Λ²(Y▷X) + Λ²(Y◁X) + Λ(YΔX), continuous weight.
cplx ito_limit_element(const CoupledOperator& y, const CoupledOperator& x, double t,
                       const CVec& u, const StepFunction& f, const CVec& v,
                       const StepFunction& g);

namespace detail {
// (e^z − 1)/z and (e^z − 1 − z)/z², with power series near 0.
cplx phi1(cplx z);
cplx phi2(cplx z);
}  // namespace detail

}  // namespace toyfock
