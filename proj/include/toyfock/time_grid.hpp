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
#include <initializer_list>
#include <vector>

#include "toyfock/core_tensor.hpp"

namespace toyfock {

// Tolerance used when matching partition points and integration times.
inline constexpr double kTimeTolerance = 1e-12;

// Grid 0 = τ₀ < τ₁ < … < τ_N = T on a finite horizon. Everything beyond T is
// treated as vacuum, so test functions must vanish there.
class Partition {
 public:
  explicit Partition(std::vector<double> times);

  static Partition uniform(std::size_t cells, double horizon);
  // 2^level uniform cells.
  static Partition dyadic(unsigned level, double horizon);

  std::size_t cells() const { return times_.size() - 1; }
  double horizon() const { return times_.back(); }
  double time(std::size_t i) const { return times_[i]; }
  double width(std::size_t cell) const { return times_[cell + 1] - times_[cell]; }
  const std::vector<double>& times() const { return times_; }

  // Index n with t ∈ [τ_n, τ_{n+1}); returns cells() for t ≥ T.
  std::size_t cell_of(double t) const;
  // Number of cells whose right end satisfies τ_{n+1} ≤ t (ties included).
  std::size_t complete_cells(double t) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<double> times_;
};

double mesh(const Partition& tau);

// True iff every point of `coarse` appears in `fine` (within kTimeTolerance).
// Throws if the horizons differ.
bool refines(const Partition& fine, const Partition& coarse);

// Piecewise-constant C^d-valued function: values[i] on
// [breakpoints[i], breakpoints[i+1]), zero elsewhere.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<CVec> values);
  // Explicit dimension; allows an empty value list (the zero function).
  StepFunction(std::size_t dim, std::vector<double> breakpoints, std::vector<CVec> values);

  static StepFunction zero(std::size_t dim_k);
  static StepFunction indicator(double start, double end, const CVec& value);
  static StepFunction scalar_indicator(double start, double end, cplx value = 1.0);

  std::size_t dim() const { return dim_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<CVec>& values() const { return values_; }
  double support_end() const { return breakpoints_.back(); }

  CVec value_at(double t) const;
  // ∫_a^b f.
  CVec integral(double a, double b) const;

  StepFunction operator-(const StepFunction& other) const;
  StepFunction operator+(const StepFunction& other) const;
  StepFunction operator*(cplx s) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> breakpoints_;
  std::vector<CVec> values_;
};

// Sorted union of the given breakpoint lists, restricted to [lo, hi] and
// deduplicated within kTimeTolerance. lo and hi are always included.
std::vector<double> merge_grids(std::initializer_list<const std::vector<double>*> grids,
                                double lo, double hi);

// f_τ(n) = (τ_{n+1} − τ_n)^{-1/2} ∫_{τ_n}^{τ_{n+1}} f, n = 0..N−1.
std::vector<CVec> coarse_grain(const StepFunction& f, const Partition& tau);

// Conditional expectation onto τ-cells (cellwise average).
StepFunction project(const StepFunction& f, const Partition& tau);

// ∫⟨f, g⟩, conjugate-linear in f.
cplx l2_inner(const StepFunction& f, const StepFunction& g);
// ∫₀^s ⟨f, g⟩.
cplx cumulative_inner(const StepFunction& f, const StepFunction& g, double s);
double l2_norm(const StepFunction& f);
// ⟨ε(f), ε(g)⟩ = exp(∫⟨f, g⟩).
cplx exp_inner(const StepFunction& f, const StepFunction& g);

}  // namespace toyfock
