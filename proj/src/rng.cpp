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

#include "toyfock/rng.hpp"

namespace toyfock {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CMat random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = rng.uniform();
      const double im = rng.uniform();
      m(r, c) = cplx(re, im);
    }
  }
  return m;
}

CVec random_vector(std::size_t n, SplitMix64& rng) {
  CVec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = rng.uniform();
    const double im = rng.uniform();
    v(i) = cplx(re, im);
  }
  return v;
}

CoupledOperator random_operator(std::size_t dim_h, std::size_t dim_k, std::size_t arity,
                                std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t n = CoupledOperator::zero(dim_h, dim_k, arity).dim();
  return CoupledOperator(random_matrix(n, n, rng), dim_h, dim_k, arity);
}

}  // namespace toyfock
