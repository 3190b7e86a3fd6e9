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

#include "toyfock/toy_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>

#include "toyfock/parallel.hpp"

namespace toyfock {

CVec vacuum_site(std::size_t dim_k) { return basis_site(dim_k, 0); }

CVec hat(const CVec& x) {
  CVec out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

CVec basis_site(std::size_t dim_k, std::size_t k) {
  CVec out = CVec::Zero(static_cast<Eigen::Index>(dim_k + 1));
  out(static_cast<Eigen::Index>(k)) = 1.0;
  return out;
}

// --- CoupledOperator --------------------------------------------------------

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

CoupledOperator::CoupledOperator(CMat matrix, std::size_t dim_h, std::size_t dim_k,
                                 std::size_t arity)
    : matrix_(std::move(matrix)), dim_h_(dim_h), dim_k_(dim_k), arity_(arity) {
  if (dim_h_ == 0 || dim_k_ == 0) {
    throw std::invalid_argument("CoupledOperator: dimensions must be positive");
  }
  const std::size_t n = dim_h_ * ipow(dim_k_ + 1, arity_);
  if (matrix_.rows() != static_cast<Eigen::Index>(n) ||
      matrix_.cols() != static_cast<Eigen::Index>(n)) {
    throw std::invalid_argument("CoupledOperator: expected a " + std::to_string(n) + "x" +
                                std::to_string(n) + " matrix, got " +
                                std::to_string(matrix_.rows()) + "x" +
                                std::to_string(matrix_.cols()));
  }
}

CoupledOperator CoupledOperator::zero(std::size_t dim_h, std::size_t dim_k, std::size_t arity) {
  const auto n = static_cast<Eigen::Index>(dim_h * ipow(dim_k + 1, arity));
  return CoupledOperator(CMat::Zero(n, n), dim_h, dim_k, arity);
}

CoupledOperator CoupledOperator::identity(std::size_t dim_h, std::size_t dim_k,
                                          std::size_t arity) {
  return CoupledOperator(toyfock::identity(dim_h * ipow(dim_k + 1, arity)), dim_h, dim_k,
                         arity);
}

CoupledOperator CoupledOperator::adjoint() const {
  return CoupledOperator(matrix_.adjoint(), dim_h_, dim_k_, arity_);
}

void CoupledOperator::check_compatible(const CoupledOperator& rhs) const {
  if (dim_h_ != rhs.dim_h_ || dim_k_ != rhs.dim_k_ || arity_ != rhs.arity_) {
    throw std::invalid_argument("CoupledOperator: incompatible operands");
  }
}

CoupledOperator CoupledOperator::operator*(const CoupledOperator& rhs) const {
  check_compatible(rhs);
  return CoupledOperator(matrix_ * rhs.matrix_, dim_h_, dim_k_, arity_);
}

CoupledOperator CoupledOperator::operator+(const CoupledOperator& rhs) const {
  check_compatible(rhs);
  return CoupledOperator(matrix_ + rhs.matrix_, dim_h_, dim_k_, arity_);
}

CoupledOperator CoupledOperator::operator-(const CoupledOperator& rhs) const {
  check_compatible(rhs);
  return CoupledOperator(matrix_ - rhs.matrix_, dim_h_, dim_k_, arity_);
}

CoupledOperator CoupledOperator::operator*(cplx s) const {
  return CoupledOperator(matrix_ * s, dim_h_, dim_k_, arity_);
}

// --- ToyState ---------------------------------------------------------------

ToyState::ToyState(Partition tau, std::size_t dim_h, std::size_t dim_k)
    : tau_(std::move(tau)), dim_h_(dim_h), dim_k_(dim_k) {
  if (dim_h_ == 0 || dim_k_ == 0) throw std::invalid_argument("ToyState: zero dimension");
}

void ToyState::add_term(Term term) {
  if (static_cast<std::size_t>(term.h.size()) != dim_h_) {
    throw std::invalid_argument("ToyState: initial-space vector has wrong dimension");
  }
  if (term.sites.size() != cells() * site_dim()) {
    throw std::invalid_argument("ToyState: site list does not match the partition");
  }
  terms_.push_back(std::move(term));
}

void ToyState::add_product(cplx coeff, CVec h, std::span<const CVec> sites) {
  if (sites.size() != cells()) {
    throw std::invalid_argument("ToyState: need one site vector per cell");
  }
  Term term{coeff, std::move(h), {}};
  term.sites.reserve(cells() * site_dim());
  for (const auto& s : sites) {
    if (static_cast<std::size_t>(s.size()) != site_dim()) {
      throw std::invalid_argument("ToyState: site vector has wrong dimension");
    }
    term.sites.insert(term.sites.end(), s.data(), s.data() + s.size());
  }
  add_term(std::move(term));
}

ToyState ToyState::scaled(cplx s) const {
  ToyState out = *this;
  for (auto& t : out.terms_) t.coeff *= s;
  return out;
}

ToyState embed_exponential(const CVec& u, const StepFunction& f, const Partition& tau) {
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    if (f.breakpoints()[i + 1] > tau.horizon() + kTimeTolerance && f.values()[i].norm() > 0.0) {
      throw std::invalid_argument("embed_exponential: test function extends past the horizon");
    }
  }
  ToyState out(tau, static_cast<std::size_t>(u.size()), f.dim());
  const auto grains = coarse_grain(f, tau);
  std::vector<CVec> sites;
  sites.reserve(grains.size());
  for (const auto& g : grains) sites.push_back(hat(g));
  out.add_product(1.0, u, sites);
  return out;
}

namespace {

void check_same_space(const ToyState& a, const ToyState& b) {
  if (a.dim_h() != b.dim_h() || a.dim_k() != b.dim_k()) {
    throw std::invalid_argument("ToyState: dimension mismatch");
  }
}

inline cplx site_product(const cplx* a, const cplx* b, std::size_t cells, std::size_t sd) {
  cplx prod = 1.0;
  for (std::size_t n = 0; n < cells; ++n, a += sd, b += sd) {
    cplx s = std::conj(a[0]) * b[0];
    for (std::size_t k = 1; k < sd; ++k) s += std::conj(a[k]) * b[k];
    prod *= s;
    if (prod == cplx(0.0)) return prod;
  }
  return prod;
}

// Σ_i row(i), rows evaluated (possibly concurrently) and summed in order.
template <typename Row>
cplx ordered_sum(std::size_t rows, Row row) {
  std::vector<cplx> partial(rows);
  parallel_for(rows, [&](std::size_t i) { partial[i] = row(i); });
  cplx acc = 0.0;
  for (const auto& p : partial) acc += p;
  return acc;
}

}  // namespace

cplx inner(const ToyState& xi, const ToyState& eta) {
  check_same_space(xi, eta);
  if (!(xi.partition() == eta.partition())) {
    throw std::invalid_argument("inner: states live on different partitions");
  }
  const std::size_t cells = xi.cells();
  const std::size_t sd = xi.site_dim();
  return ordered_sum(xi.size(), [&](std::size_t i) {
    const Term& a = xi.terms()[i];
    cplx row = 0.0;
    for (const Term& b : eta.terms()) {
      const cplx hh = a.h.dot(b.h);
      if (hh == cplx(0.0)) continue;
      row += std::conj(a.coeff) * b.coeff * hh *
             site_product(a.sites.data(), b.sites.data(), cells, sd);
    }
    return row;
  });
}

double norm(const ToyState& xi) {
  // Hermitian Gram sum: diagonal plus twice the real part of the upper triangle.
  const std::size_t cells = xi.cells();
  const std::size_t sd = xi.site_dim();
  const auto& terms = xi.terms();
  const cplx sq = ordered_sum(terms.size(), [&](std::size_t i) {
    const Term& a = terms[i];
    double row = 0.0;
    for (std::size_t j = i; j < terms.size(); ++j) {
      const Term& b = terms[j];
      const cplx hh = a.h.dot(b.h);
      if (hh == cplx(0.0)) continue;
      const cplx v = std::conj(a.coeff) * b.coeff * hh *
                     site_product(a.sites.data(), b.sites.data(), cells, sd);
      row += (j == i ? 1.0 : 2.0) * v.real();
    }
    return cplx(row);
  });
  return std::sqrt(std::max(0.0, sq.real()));
}

cplx cross_inner(const ToyState& coarse, const ToyState& fine) {
  check_same_space(coarse, fine);
  const Partition& tau = coarse.partition();
  const Partition& sigma = fine.partition();
  if (!refines(sigma, tau)) {
    throw std::invalid_argument("cross_inner: the fine partition does not refine the coarse one");
  }
  // σ-cells [first[n], first[n+1]) subdivide τ-cell n; weight √(Δᵢ/Δ).
  std::vector<std::size_t> first(tau.cells() + 1);
  std::vector<double> weight(sigma.cells());
  {
    std::size_t k = 0;
    for (std::size_t n = 0; n < tau.cells(); ++n) {
      first[n] = k;
      while (k < sigma.cells() && sigma.time(k) < tau.time(n + 1) - kTimeTolerance) {
        weight[k] = std::sqrt(sigma.width(k) / tau.width(n));
        ++k;
      }
    }
    first[tau.cells()] = k;
  }
  const std::size_t sd = coarse.site_dim();
  return ordered_sum(coarse.size(), [&](std::size_t i) {
    const Term& a = coarse.terms()[i];
    cplx row = 0.0;
    for (const Term& b : fine.terms()) {
      const cplx hh = a.h.dot(b.h);
      if (hh == cplx(0.0)) continue;
      cplx prod = 1.0;
      for (std::size_t n = 0; n < tau.cells() && prod != cplx(0.0); ++n) {
        const cplx* x = a.sites.data() + n * sd;
        // Running products: vac = ∏ μ, one = Σᵢ wᵢ⟨x, yᵢ⟩ ∏_{j≠i} μⱼ.
        cplx vac = 1.0;
        cplx one = 0.0;
        for (std::size_t s = first[n]; s < first[n + 1]; ++s) {
          const cplx* y = b.sites.data() + s * sd;
          cplx xy = 0.0;
          for (std::size_t k = 1; k < sd; ++k) xy += std::conj(x[k]) * y[k];
          one = one * y[0] + vac * weight[s] * xy;
          vac *= y[0];
        }
        prod *= std::conj(x[0]) * vac + one;
      }
      row += std::conj(a.coeff) * b.coeff * hh * prod;
    }
    return row;
  });
}

namespace detail {

void check_sites(std::span<const std::size_t> sites, std::size_t cells) {
  if (sites.empty()) throw std::invalid_argument("site list is empty");
  for (std::size_t m = 0; m < sites.size(); ++m) {
    if (sites[m] >= cells) throw std::invalid_argument("site index out of range");
    if (m > 0 && sites[m] <= sites[m - 1]) {
      throw std::invalid_argument("site indices must be strictly increasing");
    }
  }
}

void apply_to_term(const ToyState& state, const Term& term, const CMat& matrix,
                   std::span<const std::size_t> sites, bool vacuum_window,
                   const TermSink& sink) {
  const std::size_t sd = state.site_dim();
  const std::size_t dim_h = state.dim_h();
  const std::size_t arity = sites.size();
  std::vector<cplx> buf = term.sites;
  cplx coeff = term.coeff;
  if (vacuum_window) {
    std::size_t next = 1;
    for (std::size_t q = sites[0] + 1; q < state.cells(); ++q) {
      if (next < arity && sites[next] == q) {
        ++next;
        continue;
      }
      cplx* s = buf.data() + q * sd;
      coeff *= s[0];
      s[0] = 1.0;
      for (std::size_t k = 1; k < sd; ++k) s[k] = 0.0;
    }
    if (coeff == cplx(0.0)) return;
  }
  // Input vector h ⊗ s[p₁] ⊗ … ⊗ s[pₙ].
  CVec in = term.h;
  for (std::size_t p : sites) {
    in = kron(in, Eigen::Map<const CVec>(term.sites.data() + p * sd,
                                          static_cast<Eigen::Index>(sd))
                      .eval());
  }
  const CVec out = matrix * in;
  const std::size_t block = static_cast<std::size_t>(out.size()) / dim_h;
  CVec h(static_cast<Eigen::Index>(dim_h));
  std::vector<std::size_t> digits(arity, 0);
  for (std::size_t k = 0; k < block; ++k) {
    bool nonzero = false;
    for (std::size_t a = 0; a < dim_h; ++a) {
      h(static_cast<Eigen::Index>(a)) = out(static_cast<Eigen::Index>(a * block + k));
      nonzero = nonzero || h(static_cast<Eigen::Index>(a)) != cplx(0.0);
    }
    if (nonzero) {
      std::size_t rem = k;
      for (std::size_t m = arity; m-- > 0;) {
        digits[m] = rem % sd;
        rem /= sd;
      }
      for (std::size_t m = 0; m < arity; ++m) {
        cplx* s = buf.data() + sites[m] * sd;
        for (std::size_t j = 0; j < sd; ++j) s[j] = (j == digits[m]) ? 1.0 : 0.0;
      }
      sink(coeff, h, buf);
    }
  }
}

}  // namespace detail

ToyState apply_site_coupled(const ToyState& xi, const CoupledOperator& x,
                            std::span<const std::size_t> sites, bool vacuum_window) {
  if (x.dim_h() != xi.dim_h() || x.dim_k() != xi.dim_k()) {
    throw std::invalid_argument("apply_site_coupled: operator does not match the state");
  }
  if (x.arity() != sites.size()) {
    throw std::invalid_argument("apply_site_coupled: operator arity != number of sites");
  }
  detail::check_sites(sites, xi.cells());
  ToyState out(xi.partition(), xi.dim_h(), xi.dim_k());
  for (const Term& t : xi.terms()) {
    detail::apply_to_term(xi, t, x.matrix(), sites, vacuum_window,
                          [&](cplx c, const CVec& h, std::span<const cplx> s) {
                            out.add_term(Term{c, h, std::vector<cplx>(s.begin(), s.end())});
                          });
  }
  return out;
}

TermAccumulator::TermAccumulator(Partition tau, std::size_t dim_h, std::size_t dim_k)
    : tau_(std::move(tau)), dim_h_(dim_h), dim_k_(dim_k) {}

void TermAccumulator::add(cplx coeff, const CVec& h, std::span<const cplx> sites) {
  const std::string_view bytes(reinterpret_cast<const char*>(sites.data()),
                               sites.size_bytes());
  const std::size_t key = std::hash<std::string_view>{}(bytes);
  auto [lo, hi] = index_.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    Term& t = terms_[it->second];
    if (std::memcmp(t.sites.data(), sites.data(), sites.size_bytes()) == 0) {
      t.h += coeff * h;
      return;
    }
  }
  index_.emplace(key, terms_.size());
  terms_.push_back(Term{1.0, coeff * h, std::vector<cplx>(sites.begin(), sites.end())});
}

ToyState TermAccumulator::finish() && {
  ToyState out(std::move(tau_), dim_h_, dim_k_);
  for (auto& t : terms_) {
    if ((t.h.array() != cplx(0.0)).any()) out.add_term(std::move(t));
  }
  terms_.clear();
  index_.clear();
  return out;
}

ToyState merge_terms(const ToyState& xi) {
  TermAccumulator acc(xi.partition(), xi.dim_h(), xi.dim_k());
  for (const Term& t : xi.terms()) acc.add(t.coeff, t.h, t.sites);
  return std::move(acc).finish();
}

ToyState add_scaled(const ToyState& a, cplx s, const ToyState& b) {
  check_same_space(a, b);
  if (!(a.partition() == b.partition())) {
    throw std::invalid_argument("add_scaled: states live on different partitions");
  }
  TermAccumulator acc(a.partition(), a.dim_h(), a.dim_k());
  for (const Term& t : a.terms()) acc.add(t.coeff, t.h, t.sites);
  for (const Term& t : b.terms()) acc.add(s * t.coeff, t.h, t.sites);
  return std::move(acc).finish();
}

double triangle_norm_bound(const ToyState& xi) {
  const std::size_t sd = xi.site_dim();
  double total = 0.0;
  for (const Term& t : xi.terms()) {
    double v = std::abs(t.coeff) * t.h.norm();
    for (std::size_t n = 0; n < xi.cells() && v != 0.0; ++n) {
      v *= Eigen::Map<const CVec>(t.sites.data() + n * sd, static_cast<Eigen::Index>(sd)).norm();
    }
    total += v;
  }
  return total;
}

}  // namespace toyfock
