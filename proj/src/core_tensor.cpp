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

#include "toyfock/core_tensor.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace toyfock {

std::size_t FactorShape::total() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

FactorShape FactorShape::coupled(std::size_t dim_h, std::size_t dim_k, std::size_t arity) {
  FactorShape shape;
  shape.dims.push_back(dim_h);
  shape.dims.insert(shape.dims.end(), arity, dim_k + 1);
  return shape;
}

CMat identity(std::size_t n) {
  return CMat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

CMat adjoint(const CMat& a) { return a.adjoint(); }

std::size_t flat_index(std::span<const std::size_t> multi, std::span<const std::size_t> dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + multi[k];
  return idx;
}

std::vector<std::size_t> multi_index(std::size_t flat, std::span<const std::size_t> dims) {
  std::vector<std::size_t> multi(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    multi[k] = flat % dims[k];
    flat /= dims[k];
  }
  return multi;
}

namespace {

void check_permutation(const FactorShape& shape, std::span<const std::size_t> perm) {
  if (perm.size() != shape.factors()) {
    throw std::invalid_argument("permute_factors: permutation length " +
                                std::to_string(perm.size()) + " != factor count " +
                                std::to_string(shape.factors()));
  }
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p]) {
      throw std::invalid_argument("permute_factors: not a permutation");
    }
    seen[p] = true;
  }
  if (shape.leading_initial && !perm.empty() && perm[0] != 0) {
    throw std::invalid_argument("permute_factors: the initial-space factor must stay first");
  }
}

}  // namespace

FactorShape permuted_shape(const FactorShape& shape, std::span<const std::size_t> perm) {
  check_permutation(shape, perm);
  FactorShape out;
  out.leading_initial = shape.leading_initial;
  for (std::size_t p : perm) out.dims.push_back(shape.dims[p]);
  return out;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  return inv;
}

CMat permute_factors(const CMat& a, const FactorShape& shape,
                     std::span<const std::size_t> perm) {
  const FactorShape out_shape = permuted_shape(shape, perm);
  const std::size_t n = shape.total();
  if (a.rows() != static_cast<Eigen::Index>(n) || a.cols() != static_cast<Eigen::Index>(n)) {
    throw std::invalid_argument("permute_factors: matrix is not " + std::to_string(n) +
                                "x" + std::to_string(n));
  }
  std::vector<std::size_t> sigma(n);
  std::vector<std::size_t> relabeled(perm.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto multi = multi_index(i, shape.dims);
    for (std::size_t k = 0; k < perm.size(); ++k) relabeled[k] = multi[perm[k]];
    sigma[i] = flat_index(relabeled, out_shape.dims);
  }
  CMat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(sigma[i]), static_cast<Eigen::Index>(sigma[j])) =
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

double operator_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace toyfock
