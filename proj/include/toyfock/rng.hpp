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

#include <cstdint>
#include <string_view>

#include "toyfock/core_tensor.hpp"
#include "toyfock/toy_state.hpp"

namespace toyfock {

// splitmix64; see docs/config.md for the exact recipe used to fill matrices.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view text);

// Row-major fill, real part then imaginary part, each uniform on [0, 1).
CMat random_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng);
CVec random_vector(std::size_t n, SplitMix64& rng);

CoupledOperator random_operator(std::size_t dim_h, std::size_t dim_k, std::size_t arity,
                                std::uint64_t seed);

}  // namespace toyfock
