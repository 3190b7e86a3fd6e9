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

#include "toyfock/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace toyfock {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("Partition: need at least one cell");
  if (times_.front() != 0.0) throw std::invalid_argument("Partition: must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i])) {
      throw std::invalid_argument("Partition: times must be finite and strictly increasing");
    }
  }
}

Partition Partition::uniform(std::size_t cells, double horizon) {
  if (cells == 0 || !(horizon > 0.0)) {
    throw std::invalid_argument("Partition::uniform: need cells > 0 and horizon > 0");
  }
  std::vector<double> times(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    times[i] = static_cast<double>(i) * horizon / static_cast<double>(cells);
  }
  times.back() = horizon;
  return Partition(std::move(times));
}

Partition Partition::dyadic(unsigned level, double horizon) {
  if (level > 30) throw std::invalid_argument("Partition::dyadic: level too large");
  return uniform(std::size_t{1} << level, horizon);
}

std::size_t Partition::cell_of(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t + kTimeTolerance);
  const auto count = static_cast<std::size_t>(it - times_.begin());
  if (count == 0) return 0;
  return std::min(count - 1, cells());
}

std::size_t Partition::complete_cells(double t) const { return cell_of(t); }

double mesh(const Partition& tau) {
  double m = 0.0;
  for (std::size_t n = 0; n < tau.cells(); ++n) m = std::max(m, tau.width(n));
  return m;
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (std::abs(fine.horizon() - coarse.horizon()) > kTimeTolerance) {
    throw std::invalid_argument("refines: horizon mismatch");
  }
  const auto& pts = fine.times();
  for (double c : coarse.times()) {
    const auto it = std::lower_bound(pts.begin(), pts.end(), c - kTimeTolerance);
    if (it == pts.end() || std::abs(*it - c) > kTimeTolerance) return false;
  }
  return true;
}

// --- StepFunction -----------------------------------------------------------

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<CVec> values)
    : StepFunction(values.empty() ? 0 : static_cast<std::size_t>(values.front().size()),
                   std::move(breakpoints), std::vector<CVec>(values)) {}

StepFunction::StepFunction(std::size_t dim, std::vector<double> breakpoints,
                           std::vector<CVec> values)
    : dim_(dim), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (dim_ == 0) throw std::invalid_argument("StepFunction: dimension must be positive");
  if (breakpoints_.size() != values_.size() + 1) {
    throw std::invalid_argument("StepFunction: need one more breakpoint than values");
  }
  if (breakpoints_.front() < 0.0) throw std::invalid_argument("StepFunction: negative time");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1]) || !std::isfinite(breakpoints_[i])) {
      throw std::invalid_argument("StepFunction: breakpoints must be strictly increasing");
    }
  }
  for (const auto& v : values_) {
    if (static_cast<std::size_t>(v.size()) != dim_) {
      throw std::invalid_argument("StepFunction: inconsistent value dimension");
    }
    if (!v.allFinite()) throw std::invalid_argument("StepFunction: non-finite value");
  }
}

StepFunction StepFunction::zero(std::size_t dim_k) { return StepFunction(dim_k, {0.0}, {}); }

StepFunction StepFunction::indicator(double start, double end, const CVec& value) {
  return StepFunction({start, end}, {value});
}

StepFunction StepFunction::scalar_indicator(double start, double end, cplx value) {
  CVec v(1);
  v(0) = value;
  return indicator(start, end, v);
}

CVec StepFunction::value_at(double t) const {
  if (values_.empty() || t < breakpoints_.front() || t >= breakpoints_.back()) {
    return CVec::Zero(static_cast<Eigen::Index>(dim_));
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

CVec StepFunction::integral(double a, double b) const {
  CVec acc = CVec::Zero(static_cast<Eigen::Index>(dim_));
  if (!(b > a)) return acc;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double lo = std::max(a, breakpoints_[i]);
    const double hi = std::min(b, breakpoints_[i + 1]);
    if (hi > lo) acc += (hi - lo) * values_[i];
  }
  return acc;
}

namespace {

template <typename Op>
StepFunction combine(const StepFunction& f, const StepFunction& g, Op op) {
  if (f.dim() != g.dim()) throw std::invalid_argument("StepFunction: dimension mismatch");
  const double lo = std::min(f.breakpoints().front(), g.breakpoints().front());
  const double hi = std::max(f.support_end(), g.support_end());
  if (!(hi > lo)) return StepFunction::zero(f.dim());
  auto grid = merge_grids({&f.breakpoints(), &g.breakpoints()}, lo, hi);
  std::vector<CVec> values;
  values.reserve(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    values.push_back(op(f.value_at(mid), g.value_at(mid)));
  }
  return StepFunction(f.dim(), std::move(grid), std::move(values));
}

// ∫ over each [grid[i], grid[i+1]) of f, by a single merge walk.
std::vector<CVec> cell_integrals(const StepFunction& f, const std::vector<double>& grid) {
  std::vector<CVec> out(grid.size() - 1, CVec::Zero(static_cast<Eigen::Index>(f.dim())));
  const auto& bp = f.breakpoints();
  const auto& vals = f.values();
  std::size_t k = 0;
  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double a = grid[n];
    const double b = grid[n + 1];
    while (k < vals.size() && bp[k + 1] <= a) ++k;
    for (std::size_t j = k; j < vals.size() && bp[j] < b; ++j) {
      const double lo = std::max(a, bp[j]);
      const double hi = std::min(b, bp[j + 1]);
      if (hi > lo) out[n] += (hi - lo) * vals[j];
    }
  }
  return out;
}

cplx inner_on(const StepFunction& f, const StepFunction& g, double lo, double hi) {
  if (f.dim() != g.dim()) throw std::invalid_argument("l2_inner: dimension mismatch");
  if (!(hi > lo)) return 0.0;
  const auto grid = merge_grids({&f.breakpoints(), &g.breakpoints()}, lo, hi);
  cplx acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    acc += (grid[i + 1] - grid[i]) * f.value_at(mid).dot(g.value_at(mid));
  }
  return acc;
}

}  // namespace

StepFunction StepFunction::operator-(const StepFunction& other) const {
  return combine(*this, other, [](const CVec& a, const CVec& b) -> CVec { return a - b; });
}

StepFunction StepFunction::operator+(const StepFunction& other) const {
  return combine(*this, other, [](const CVec& a, const CVec& b) -> CVec { return a + b; });
}

StepFunction StepFunction::operator*(cplx s) const {
  std::vector<CVec> vals = values_;
  for (auto& v : vals) v *= s;
  return StepFunction(dim_, breakpoints_, std::move(vals));
}

std::vector<double> merge_grids(std::initializer_list<const std::vector<double>*> grids,
                                double lo, double hi) {
  std::vector<double> all{lo, hi};
  for (const auto* g : grids) {
    for (double x : *g) {
      if (x > lo && x < hi) all.push_back(x);
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.reserve(all.size());
  for (double x : all) {
    if (out.empty() || x - out.back() > kTimeTolerance) out.push_back(x);
  }
  // Keep the exact upper end rather than a near-duplicate interior point.
  if (out.size() >= 2 && out.back() != hi) out.back() = hi;
  return out;
}

std::vector<CVec> coarse_grain(const StepFunction& f, const Partition& tau) {
  auto out = cell_integrals(f, tau.times());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] /= std::sqrt(tau.width(n));
  return out;
}

StepFunction project(const StepFunction& f, const Partition& tau) {
  auto vals = cell_integrals(f, tau.times());
  for (std::size_t n = 0; n < vals.size(); ++n) vals[n] /= tau.width(n);
  return StepFunction(f.dim(), tau.times(), std::move(vals));
}

cplx l2_inner(const StepFunction& f, const StepFunction& g) {
  const double lo = std::min(f.breakpoints().front(), g.breakpoints().front());
  const double hi = std::max(f.support_end(), g.support_end());
  return inner_on(f, g, lo, hi);
}

cplx cumulative_inner(const StepFunction& f, const StepFunction& g, double s) {
  return inner_on(f, g, 0.0, s);
}

double l2_norm(const StepFunction& f) { return std::sqrt(std::max(0.0, l2_inner(f, f).real())); }

cplx exp_inner(const StepFunction& f, const StepFunction& g) { return std::exp(l2_inner(f, g)); }

}  // namespace toyfock
