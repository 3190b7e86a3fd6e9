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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace toyfock {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tensor-factor layout of a square matrix. Factor 0 is the slowest-varying
// index of the flattened multi-index; when `leading_initial` is set it is the
// initial space h and must stay in place under permutations.
struct FactorShape {
  std::vector<std::size_t> dims;
  bool leading_initial = true;

  std::size_t total() const;
  std::size_t factors() const { return dims.size(); }

  // h ⊗ k̂^⊗n with k̂ = C^(dim_k+1).
  static FactorShape coupled(std::size_t dim_h, std::size_t dim_k, std::size_t arity);
};

CMat identity(std::size_t n);
CMat kron(const CMat& a, const CMat& b);
CVec kron(const CVec& a, const CVec& b);
CMat adjoint(const CMat& a);

// Output factor k is input factor perm[k]; entries move so that
// out(σ(i), σ(j)) = a(i, j) with σ the induced relabeling of multi-indices.
CMat permute_factors(const CMat& a, const FactorShape& shape,
                     std::span<const std::size_t> perm);
FactorShape permuted_shape(const FactorShape& shape, std::span<const std::size_t> perm);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

// Flat index <-> multi-index under the slowest-first convention.
std::size_t flat_index(std::span<const std::size_t> multi, std::span<const std::size_t> dims);
std::vector<std::size_t> multi_index(std::size_t flat, std::span<const std::size_t> dims);

// Largest entrywise modulus of a - b.
double max_abs_diff(const CMat& a, const CMat& b);

// Spectral norm (largest singular value).
double operator_norm(const CMat& a);

}  // namespace toyfock
