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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support.hpp"
#include "toyfock/time_grid.hpp"

using namespace toyfock;
using namespace toyfock::testing;

namespace {
CVec one(cplx v) {
  CVec x(1);
  x(0) = v;
  return x;
}
}  // namespace

TEST_CASE("partition construction") {
  CHECK_THROWS_AS(Partition({0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5}), std::invalid_argument);
  const Partition tau = Partition::dyadic(3, 2.0);
  CHECK(tau.cells() == 8);
  CHECK(tau.horizon() == 2.0);
  CHECK(tau.time(3) == 0.75);
}

TEST_CASE("mesh") {
  CHECK(mesh(Partition::uniform(4, 1.0)) == doctest::Approx(0.25));
  CHECK(mesh(Partition({0.0, 0.1, 1.0})) == doctest::Approx(0.9));
  SplitMix64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Partition tau = random_partition(5, 1.0, rng);
    std::vector<double> t = tau.times();
    t.push_back(0.5 * (t[0] + t[1]));
    std::sort(t.begin(), t.end());
    CHECK(mesh(Partition(t)) <= mesh(tau));
  }
}

TEST_CASE("refines") {
  const Partition a = Partition::uniform(4, 1.0);
  CHECK(refines(a, a));
  CHECK(refines(Partition::uniform(8, 1.0), a));
  CHECK_FALSE(refines(a, Partition::uniform(8, 1.0)));
  CHECK_FALSE(refines(Partition({0.0, 0.3, 1.0}), Partition({0.0, 0.5, 1.0})));
  CHECK_THROWS_AS(refines(a, Partition::uniform(4, 2.0)), std::invalid_argument);
}

TEST_CASE("cell lookup honours ties") {
  const Partition tau = Partition::uniform(4, 1.0);
  CHECK(tau.cell_of(0.0) == 0);
  CHECK(tau.cell_of(0.25) == 1);
  CHECK(tau.cell_of(0.2499999) == 0);
  CHECK(tau.cell_of(1.0) == 4);
  CHECK(tau.complete_cells(0.5) == 2);
  CHECK(tau.complete_cells(0.49) == 1);
  CHECK(tau.complete_cells(0.1) == 0);
}

TEST_CASE("coarse graining") {
  const auto zero = coarse_grain(StepFunction::zero(2), Partition::uniform(3, 1.0));
  for (const auto& v : zero) CHECK(v.norm() == 0.0);
  const auto c = coarse_grain(StepFunction::scalar_indicator(0.0, 1.0),
                              Partition::uniform(4, 1.0));
  for (const auto& v : c) CHECK(std::abs(v(0) - 0.5) <= 1e-15);
  const auto d = coarse_grain(StepFunction::scalar_indicator(0.0, 0.3),
                              Partition({0.0, 0.5, 1.0}));
  CHECK(std::abs(d[0](0) - 0.3 / std::sqrt(0.5)) <= 1e-15);
  CHECK(std::abs(d[1](0)) == 0.0);
}

TEST_CASE("projection of a linear ramp") {
  const std::size_t fine = 1024;
  std::vector<double> bp;
  std::vector<CVec> vals;
  for (std::size_t i = 0; i <= fine; ++i) bp.push_back(static_cast<double>(i) / fine);
  for (std::size_t i = 0; i < fine; ++i) vals.push_back(one((i + 0.5) / fine));
  const StepFunction ramp(bp, vals);
  const StepFunction p = project(ramp, Partition::uniform(2, 1.0));
  CHECK(std::abs(p.value_at(0.1)(0) - 0.25) <= 1e-14);
  CHECK(std::abs(p.value_at(0.9)(0) - 0.75) <= 1e-14);
  // Midpoint staircase of the ramp: exact error² = 1/48 − 1/(12·fine²).
  const double expect = std::sqrt(1.0 / 48.0 - 1.0 / (12.0 * fine * fine));
  CHECK(std::abs(l2_norm(p - ramp) - expect) <= 1e-12);
}

TEST_CASE("projection is an idempotent contraction") {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const StepFunction f = random_step(2, 1.0, 5, rng);
    const Partition tau = random_partition(4, 1.0, rng);
    const StepFunction p = project(f, tau);
    CHECK(l2_norm(project(p, tau) - p) <= 1e-13);
    CHECK(l2_norm(p) <= l2_norm(f) + 1e-13);
    // Nested projections: a refinement never increases the error.
    std::vector<double> t = tau.times();
    t.push_back(0.5 * (t[1] + t[2]));
    std::sort(t.begin(), t.end());
    CHECK(l2_norm(project(f, Partition(t)) - f) <= l2_norm(p - f) + 1e-13);
    // Aligned functions are fixed.
    CHECK(l2_norm(project(p, tau) - p) <= 1e-13);
  }
}

TEST_CASE("projection error decays along dyadic refinements") {
  const StepFunction f = StepFunction::scalar_indicator(0.0, 0.37);
  double prev = 1e9;
  for (unsigned level = 2; level <= 8; ++level) {
    const double e = l2_norm(project(f, Partition::dyadic(level, 1.0)) - f);
    CHECK(e <= prev);
    prev = e;
  }
  CHECK(prev <= 0.05);
}

TEST_CASE("inner products") {
  const StepFunction z = StepFunction::zero(1);
  const StepFunction u = StepFunction::scalar_indicator(0.0, 1.0);
  const StepFunction iu = StepFunction::scalar_indicator(0.0, 1.0, cplx(0.0, 1.0));
  CHECK(l2_inner(z, z) == cplx(0.0));
  CHECK(std::abs(l2_inner(u, u) - 1.0) <= 1e-15);
  CHECK(std::abs(cumulative_inner(u, u, 0.5) - 0.5) <= 1e-15);
  CHECK(std::abs(l2_inner(iu, u) - cplx(0.0, -1.0)) <= 1e-15);
  CHECK(std::abs(exp_inner(z, z) - 1.0) <= 1e-15);
  CHECK(std::abs(exp_inner(u, u) - std::exp(1.0)) <= 1e-14);
}

TEST_CASE("exp_inner obeys Cauchy-Schwarz") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const StepFunction f = random_step(2, 1.0, 4, rng, 2.0);
    const StepFunction g = random_step(2, 1.0, 4, rng, 2.0);
    CHECK(std::abs(exp_inner(f, g)) <= std::exp(l2_norm(f) * l2_norm(g)) * (1 + 1e-13));
  }
}

TEST_CASE("step function arithmetic") {
  const StepFunction a = StepFunction::scalar_indicator(0.0, 0.5, 2.0);
  const StepFunction b = StepFunction::scalar_indicator(0.25, 1.0, 1.0);
  const StepFunction s = a + b * cplx(-1.0);
  CHECK(s.value_at(0.1)(0) == cplx(2.0));
  CHECK(s.value_at(0.3)(0) == cplx(1.0));
  CHECK(s.value_at(0.7)(0) == cplx(-1.0));
  CHECK(s.value_at(1.5)(0) == cplx(0.0));
  CHECK(std::abs(s.integral(0.0, 1.0)(0) - 0.25) <= 1e-15);
}
