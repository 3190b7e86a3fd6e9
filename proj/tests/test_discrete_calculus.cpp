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
#include "toyfock/discrete_calculus.hpp"

using namespace toyfock;
using namespace toyfock::testing;

namespace {

CVec scalar(cplx v) {
  CVec x(1);
  x(0) = v;
  return x;
}

// (Y▷X) and (Y◁X) for arity-1 factors, written out index by index.
CMat brute_left(const CoupledOperator& y, const CoupledOperator& x) {
  const std::size_t h = x.dim_h(), s = x.dim_k() + 1;
  const std::size_t n = h * s * s;
  CMat out = CMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto at = [&](std::size_t a, std::size_t i1, std::size_t i2) { return (a * s + i1) * s + i2; };
  for (std::size_t a = 0; a < h; ++a)
    for (std::size_t i1 = 0; i1 < s; ++i1)
      for (std::size_t i2 = 0; i2 < s; ++i2)
        for (std::size_t c = 0; c < h; ++c)
          for (std::size_t j1 = 0; j1 < s; ++j1)
            for (std::size_t b = 0; b < h; ++b) {
              // Pω on the second site forces j2 = 0 and an intermediate index 0.
              out(static_cast<Eigen::Index>(at(a, i1, i2)), static_cast<Eigen::Index>(at(c, j1, 0))) +=
                  y.matrix()(static_cast<Eigen::Index>(a * s + i2), static_cast<Eigen::Index>(b * s)) *
                  x.matrix()(static_cast<Eigen::Index>(b * s + i1), static_cast<Eigen::Index>(c * s + j1));
            }
  return out;
}

CMat brute_right(const CoupledOperator& y, const CoupledOperator& x) {
  // Y on the first site then Pω, after X on the second site.
  const std::size_t h = x.dim_h(), s = x.dim_k() + 1;
  const std::size_t n = h * s * s;
  CMat out = CMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto at = [&](std::size_t a, std::size_t i1, std::size_t i2) { return (a * s + i1) * s + i2; };
  for (std::size_t a = 0; a < h; ++a)
    for (std::size_t i1 = 0; i1 < s; ++i1)
      for (std::size_t c = 0; c < h; ++c)
        for (std::size_t j1 = 0; j1 < s; ++j1)
          for (std::size_t j2 = 0; j2 < s; ++j2)
            for (std::size_t b = 0; b < h; ++b) {
              out(static_cast<Eigen::Index>(at(a, i1, 0)), static_cast<Eigen::Index>(at(c, j1, j2))) +=
                  y.matrix()(static_cast<Eigen::Index>(a * s + i1), static_cast<Eigen::Index>(b * s + j1)) *
                  x.matrix()(static_cast<Eigen::Index>(b * s), static_cast<Eigen::Index>(c * s + j2));
            }
  return out;
}

ToyState random_theta(const Partition& tau, std::size_t dim_h, std::size_t d, SplitMix64& rng) {
  return random_state(tau, dim_h, d, 1 + rng.below(2), rng);
}

}  // namespace

TEST_CASE("block assembly round trip and presets") {
  SplitMix64 rng(41);
  const std::size_t h = 2, d = 2;
  NoiseBlocks b{centered_matrix(h, h, rng), centered_matrix(h, h * d, rng),
                centered_matrix(h * d, h, rng), centered_matrix(h * d, h * d, rng)};
  const CoupledOperator x = assemble(b, h, d);
  const NoiseBlocks back = decompose(x);
  CHECK(max_abs_diff(back.E, b.E) == 0.0);
  CHECK(max_abs_diff(back.F, b.F) == 0.0);
  CHECK(max_abs_diff(back.G, b.G) == 0.0);
  CHECK(max_abs_diff(back.H, b.H) == 0.0);
  CHECK(max_abs_diff(assemble(decompose(x), h, d).matrix(), x.matrix()) == 0.0);

  const NoiseBlocks c = decompose(noise::creation(1, 1));
  CHECK(c.G(0, 0) == cplx(1.0));
  CHECK(c.E.norm() + c.F.norm() + c.H.norm() == 0.0);
  CHECK(max_abs_diff(noise::annihilation(2, 3, 1).matrix(),
                     noise::creation(2, 3, 1).matrix().adjoint()) == 0.0);
  CHECK(max_abs_diff((vacuum_projection(2, 2) + particle_projection(2, 2)).matrix(),
                     identity(6)) == 0.0);
  CHECK(max_abs_diff(noise::time(1, 1).matrix(), vacuum_projection(1, 1).matrix()) == 0.0);
  CHECK_THROWS_AS(noise::creation(1, 1, 1), std::invalid_argument);
}

TEST_CASE("operator scaling") {
  const Partition tau({0.0, 0.25, 1.0});
  const std::size_t first[1] = {0};
  const CMat id = scale_operator(CoupledOperator::identity(1, 1, 1), tau, first).matrix;
  CHECK(std::abs(id(0, 0) - 0.25) <= 1e-16);
  CHECK(id(1, 1) == cplx(1.0));
  CHECK(id(0, 1) == cplx(0.0));

  SplitMix64 rng(42);
  NoiseBlocks b{CMat::Zero(1, 1), CMat::Zero(1, 2), CMat::Zero(2, 1), centered_matrix(2, 2, rng)};
  const CoupledOperator hx = assemble(b, 1, 2);
  CHECK(max_abs_diff(scale_operator(hx, tau, first).matrix, hx.matrix()) == 0.0);

  const std::size_t second[1] = {1};
  const CMat c = scale_operator(noise::creation(1, 1), tau, second).matrix;
  CHECK(std::abs(c(1, 0) - std::sqrt(0.75)) <= 1e-16);

  // Arity 2 scales each site independently.
  const std::size_t both[2] = {0, 1};
  const CMat two = scale_operator(CoupledOperator::identity(1, 1, 2), tau, both).matrix;
  CHECK(std::abs(two(0, 0) - 0.25 * 0.75) <= 1e-16);
  CHECK(std::abs(two(1, 1) - 0.25) <= 1e-16);
  CHECK(std::abs(two(2, 2) - 0.75) <= 1e-15);
  CHECK(two(3, 3) == cplx(1.0));

  const std::size_t bad[2] = {1, 0};
  CHECK_THROWS_AS(scale_operator(CoupledOperator::identity(1, 1, 2), tau, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(scale_operator(CoupledOperator::identity(1, 1, 1), tau, both),
                  std::invalid_argument);
}

TEST_CASE("equal-site products split into YΔX and the time correction") {
  SplitMix64 rng(43);
  const Partition tau = random_partition(4, 1.0, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const CoupledOperator x = centered_operator(2, 2, 1, rng);
    const CoupledOperator y = centered_operator(2, 2, 1, rng);
    const std::size_t m[1] = {rng.below(tau.cells())};
    const CMat lhs = scale_operator(y, tau, m).matrix * scale_operator(x, tau, m).matrix;
    const CMat rhs =
        scale_operator(y * particle_projection(2, 2) * x, tau, m).matrix +
        scale_operator(y * vacuum_projection(2, 2) * x, tau, m).matrix * tau.width(m[0]);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("sigma_apply agrees with the dense sum") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng.below(2);
    const std::size_t arity = 1 + rng.below(3);
    const std::size_t cells = (d == 2 ? 3 : 4);
    const Partition tau = random_partition(cells, 1.0, rng);
    const ToyState theta = random_theta(tau, 2, d, rng);
    const CoupledOperator x = centered_operator(2, d, arity, rng);
    const double t = rng.uniform() < 0.3 ? tau.time(1 + rng.below(cells)) : rng.uniform();
    const CVec got = to_dense(sigma_apply(x, tau, t, theta));
    const CVec expect = dense_sigma(x, tau, t) * to_dense(theta);
    CHECK((got - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("sigma_apply edge cases") {
  const Partition tau = Partition::uniform(6, 1.0);
  SplitMix64 rng(45);
  const ToyState theta = random_theta(tau, 1, 1, rng);
  CHECK(sigma_apply(CoupledOperator::zero(1, 1, 1), tau, 1.0, theta).size() == 0);
  CHECK(sigma_apply(CoupledOperator::identity(1, 1, 1), tau, 0.1, theta).size() == 0);
  CHECK_THROWS_AS(sigma_apply(noise::time(1, 1), tau, 1.5, theta), std::invalid_argument);
  CHECK_THROWS_AS(sigma_apply(noise::time(2, 1), tau, 1.0, theta), std::invalid_argument);

  CVec u = scalar(1.0);
  const ToyState single = embed_exponential(u, StepFunction::scalar_indicator(0.0, 0.8), tau);
  const ToyState two = sigma_apply(random_operator(1, 1, 2, 7), tau, 1.0, single);
  CHECK(two.size() <= tau.cells() * (tau.cells() - 1) / 2 * 4);
}

TEST_CASE("creation against an exponential bra") {
  for (std::size_t cells : {1, 3, 8, 20}) {
    const Partition tau = Partition::uniform(cells, 1.0);
    const StepFunction f = StepFunction::scalar_indicator(0.0, 1.0);
    const StepFunction zero = StepFunction::zero(1);
    const CVec u = scalar(1.0);
    const CoupledOperator c = noise::creation(1, 1);
    // Vacuum ket: every cell contributes √Δ·f_τ(n) = Δ.
    CHECK(std::abs(sigma_element(c, tau, 1.0, u, f, u, zero) - 1.0) <= 1e-14);
    const cplx via_apply = inner(embed_exponential(u, f, tau),
                                 sigma_apply(c, tau, 1.0, embed_exponential(u, zero, tau)));
    CHECK(std::abs(via_apply - 1.0) <= 1e-14);
    // Same exponential on both sides picks up the prefix product.
    const double n = static_cast<double>(cells);
    const cplx both = sigma_element(c, tau, 1.0, u, f, u, f);
    CHECK(std::abs(both - (std::pow(1.0 + 1.0 / n, n) - 1.0)) <= 1e-13);
  }
}

TEST_CASE("time integral at the vacuum") {
  const StepFunction zero = StepFunction::zero(1);
  const CVec u = scalar(1.0);
  for (std::size_t cells : {1, 5, 16}) {
    const Partition tau = Partition::uniform(cells, 1.0);
    CHECK(std::abs(sigma_element(noise::time(1, 1), tau, 1.0, u, zero, u, zero) - 1.0) <= 1e-14);
  }
}

TEST_CASE("sigma_element matches the apply path") {
  SplitMix64 rng(46);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.below(2);
    const std::size_t arity = 1 + rng.below(2);
    const Partition tau = random_partition(3 + rng.below(8), 1.0, rng);
    const CoupledOperator x = centered_operator(2, d, arity, rng);
    const StepFunction f = random_step(d, 1.0, 4, rng, 1.5);
    const StepFunction g = random_step(d, 1.0, 4, rng, 1.5);
    const CVec u = centered_vector(2, rng), v = centered_vector(2, rng);
    const double t = rng.uniform();
    const cplx direct = sigma_element(x, tau, t, u, f, v, g);
    const cplx via = inner(embed_exponential(u, f, tau),
                           sigma_apply(x, tau, t, embed_exponential(v, g, tau)));
    CHECK(std::abs(direct - via) <= 1e-10 * std::max(1.0, std::abs(via)));
    // Adjoint symmetry.
    if (arity == 1) {
      const cplx adj = sigma_element(x.adjoint(), tau, t, v, g, u, f);
      CHECK(std::abs(adj - std::conj(direct)) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("triangle products match index-by-index assembly") {
  SplitMix64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t h = 1 + rng.below(2), d = 1 + rng.below(2);
    const CoupledOperator x = centered_operator(h, d, 1, rng);
    const CoupledOperator y = centered_operator(h, d, 1, rng);
    CHECK(max_abs_diff(triangle_left(y, x).matrix(), brute_left(y, x)) <= 1e-13);
    CHECK(max_abs_diff(triangle_right(y, x).matrix(), brute_right(y, x)) <= 1e-13);
  }
  const CoupledOperator a = noise::annihilation(1, 1);
  const CoupledOperator ad = noise::creation(1, 1);
  CHECK(triangle_left(a, ad).matrix().norm() == 0.0);
  CHECK(triangle_right(a, ad).matrix().norm() == 0.0);
  CHECK(max_abs_diff(triangle_left(a, ad).matrix(), brute_left(a, ad)) == 0.0);
  // I▷X = X⊗Pω.
  const CoupledOperator x = centered_operator(2, 1, 1, rng);
  CMat pw = CMat::Zero(2, 2);
  pw(0, 0) = 1.0;
  CHECK(max_abs_diff(triangle_left(CoupledOperator::identity(2, 1, 1), x).matrix(),
                     kron(x.matrix(), pw)) == 0.0);
  CHECK_THROWS_AS(triangle_left(noise::time(1, 1), noise::time(2, 1)), std::invalid_argument);
}

TEST_CASE("site products realise the triangle products on states") {
  SplitMix64 rng(48);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng.below(2);
    const Partition tau = random_partition(5, 1.0, rng);
    const ToyState theta = random_theta(tau, 2, d, rng);
    const CoupledOperator x = centered_operator(2, d, 1, rng);
    const CoupledOperator y = centered_operator(2, d, 1, rng);
    const std::size_t p = rng.below(4);
    const std::size_t q = p + 1 + rng.below(4 - p);
    const std::size_t sp[1] = {p}, sq[1] = {q}, pq[2] = {p, q};
    const ToyState lhs = apply_site_coupled(apply_site_coupled(theta, x, sp, true), y, sq, true);
    const ToyState rhs = apply_site_coupled(theta, triangle_left(y, x), pq, true);
    CHECK(norm(add_scaled(lhs, -1.0, rhs)) <= 1e-12);
    const ToyState lhs2 = apply_site_coupled(apply_site_coupled(theta, x, sq, true), y, sp, true);
    const ToyState rhs2 = apply_site_coupled(theta, triangle_right(y, x), pq, true);
    CHECK(norm(add_scaled(lhs2, -1.0, rhs2)) <= 1e-12);
  }
}

TEST_CASE("discrete expectation weight") {
  const StepFunction f = StepFunction::scalar_indicator(0.0, 1.0);
  const Partition tau = Partition::uniform(10, 1.0);
  CHECK(std::abs(discrete_expectation_weight(f, f, tau, 0.55) - 1.61051) <= 1e-12);
  CHECK(discrete_expectation_weight(f, f, tau, 0.05) == cplx(1.0));
  const StepFunction z = StepFunction::zero(1);
  CHECK(discrete_expectation_weight(z, z, tau, 0.7) == cplx(1.0));
}

TEST_CASE("exact discrete product identity") {
  SplitMix64 rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng.below(2), h = 1 + rng.below(2);
    const Partition tau = random_partition(3 + rng.below(6), 1.0, rng);
    const ToyState theta = random_theta(tau, h, d, rng);
    const CoupledOperator x = centered_operator(h, d, 1, rng);
    const CoupledOperator y = centered_operator(h, d, 1, rng);
    const double t = rng.uniform();
    const ToyState defect = ito_identity_defect(y, x, tau, t, theta);
    const ToyState prod = sigma_apply(y, tau, t, sigma_apply(x, tau, t, theta));
    CHECK(norm(defect) <= 1e-10 * std::max(1.0, norm(prod)));
  }
}

TEST_CASE("product identity holds for the dense matrices") {
  SplitMix64 rng(50);
  const Partition tau = random_partition(4, 1.0, rng);
  const CoupledOperator x = centered_operator(1, 1, 1, rng);
  const CoupledOperator y = centered_operator(1, 1, 1, rng);
  const double t = 1.0;
  CMat z = CMat::Zero(16, 16);
  for (std::size_t m = 0; m < 4; ++m) {
    CMat psi = identity(2);
    psi(0, 0) = std::sqrt(tau.width(m));
    z += dense_site_operator(psi * (y * vacuum_projection(1, 1) * x).matrix() * psi, 1, 1, 4,
                             {m}, true) *
         tau.width(m);
  }
  const CMat lhs = dense_sigma(y, tau, t) * dense_sigma(x, tau, t);
  const CMat rhs = dense_sigma(triangle_left(y, x), tau, t) +
                   dense_sigma(triangle_right(y, x), tau, t) +
                   dense_sigma(y * particle_projection(1, 1) * x, tau, t) + z;
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
}

TEST_CASE("Ito remainder") {
  SplitMix64 rng(51);
  const Partition tau = Partition::uniform(6, 1.0);
  const ToyState theta = random_theta(tau, 1, 2, rng);
  const CoupledOperator h = noise::conservation(1, 2, 0, 1);
  CHECK(ito_residual_apply(h, h, tau, 1.0, theta).size() == 0);
  // Time ⊗ time: Z Ω = Σ Δ² Ω.
  const CVec u = scalar(1.0);
  const ToyState vac = embed_exponential(u, StepFunction::zero(1), tau);
  const ToyState z = ito_residual_apply(noise::time(1, 1), noise::time(1, 1), tau, 1.0, vac);
  CHECK(std::abs(inner(vac, z) - 1.0 / 6.0) <= 1e-15);
  const CVec dense = to_dense(ito_residual_apply(noise::annihilation(1, 1), noise::creation(1, 1),
                                                 tau, 1.0, random_theta(tau, 1, 1, rng)));
  CHECK(dense.norm() <= 1e-15);
}

TEST_CASE("nested sums reproduce double sums") {
  SplitMix64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng.below(2);
    const Partition tau = random_partition(5, 1.0, rng);
    const ToyState theta = random_theta(tau, 2, d, rng);
    const CoupledOperator x = centered_operator(2, d, 1, rng);
    const CoupledOperator y = centered_operator(2, d, 1, rng);
    const double t = rng.uniform();
    const ToyState left = nested_left_sum(y, x, tau, t, theta);
    const ToyState direct = sigma_apply(triangle_left(y, x), tau, t, theta);
    CHECK(norm(add_scaled(left, -1.0, direct)) <= 1e-12 * std::max(1.0, norm(direct)));
    const ToyState right = nested_right_sum(x, y, tau, t, theta);
    const ToyState direct2 = sigma_apply(triangle_right(x, y), tau, t, theta);
    CHECK(norm(add_scaled(right, -1.0, direct2)) <= 1e-12 * std::max(1.0, norm(direct2)));
  }
}
