// Copyright 2026 The misca Authors
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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "misca/error.hpp"
#include "misca/quantum.hpp"

namespace misca {

namespace odeint = boost::numeric::odeint;

namespace {

using cplx = std::complex<double>;
using cstate = std::vector<cplx>;
using rstate = std::vector<double>;

void check_options(const DissipativeOptions& o) {
  if (o.fixed_duration) {
    if (!(*o.fixed_duration >= 0.0) || !std::isfinite(*o.fixed_duration))
      throw InvalidArgument("fixed duration must be finite and nonnegative");
    return;
  }
  if (!(o.t_max > 0.0) || !std::isfinite(o.t_max)) throw InvalidArgument("t_max must be positive");
  if (!(o.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(o.checkpoint > 0.0)) throw InvalidArgument("checkpoint spacing must be positive");
}

// d rho_ab = -(D_a + D_b)/2 rho_ab + sum_l [a, b in dom l] rho_ab -> (l(a), l(b))
struct Dissipator {
  const JumpOperatorSet& ops;
  std::size_t d;

  void operator()(const cstate& x, cstate& dx, double /*t*/) const {
    const auto& dc = ops.domain_count();
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t a = 0; a < d; ++a) dx[a + b * d] = -0.5 * (dc[a] + dc[b]) * x[a + b * d];
    for (const auto& op : ops.ops())
      for (auto [b, tb] : op.map)
        for (auto [a, ta] : op.map) dx[ta + std::size_t{tb} * d] += x[a + std::size_t{b} * d];
  }
};

struct RateEquation {
  const JumpOperatorSet& ops;

  void operator()(const rstate& x, rstate& dx, double /*t*/) const {
    const auto& dc = ops.domain_count();
    for (std::size_t s = 0; s < x.size(); ++s) dx[s] = -dc[s] * x[s];
    for (const auto& op : ops.ops())
      for (auto [s, t] : op.map) dx[t] += x[s];
  }
};

template <class V>
double norm2(const V& v) {
  double acc = 0.0;
  for (const auto& e : v) acc += std::norm(e);
  return std::sqrt(acc);
}

template <class V>
double diff_norm2(const V& a, const V& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a[k] - b[k]);
  return std::sqrt(acc);
}

template <class V>
cplx inner(const V& a, const V& b) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(cplx(a[k])) * cplx(b[k]);
  return acc;
}

struct Progress {
  double elapsed = 0;
  bool converged = false;
  double stationarity = 0;
  double overlap_stationarity = 0;
};

// Integrates x in place, either for a fixed duration or until consecutive
// checkpoints differ by less than tol relative to the earlier one.
template <class State, class System>
Progress integrate(State& x, System sys, const DissipativeOptions& o) {
  Progress pr;
  if (o.fixed_duration) {
    if (*o.fixed_duration > 0.0) {
      auto stepper = odeint::make_controlled(o.abs_tol, o.rel_tol, odeint::runge_kutta_dopri5<State>());
      odeint::integrate_adaptive(stepper, sys, x, 0.0, *o.fixed_duration, std::min(o.checkpoint, *o.fixed_duration));
    }
    pr.elapsed = *o.fixed_duration;
    pr.converged = true;
    return pr;
  }
  auto stepper = odeint::make_dense_output(o.abs_tol, o.rel_tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, o.checkpoint);
  State prev = x;
  State cur = x;
  for (long k = 1;; ++k) {
    const double t_next = static_cast<double>(k) * o.checkpoint;
    while (stepper.current_time() < t_next) stepper.do_step(sys);
    stepper.calc_state(t_next, cur);
    const double base = norm2(prev);
    pr.stationarity = base > 0 ? diff_norm2(cur, prev) / base : 0.0;
    pr.overlap_stationarity = base > 0 ? 1.0 - std::abs(inner(prev, cur)) / (base * base) : 0.0;
    pr.elapsed = t_next;
    if (pr.stationarity < o.tol) {
      pr.converged = true;
      break;
    }
    if (t_next >= o.t_max) break;
    std::swap(prev, cur);
  }
  x = std::move(cur);
  return pr;
}

// Longest-path depth of each basis position in the jump graph s -> L(s).
std::vector<int> jump_depths(const JumpOperatorSet& ops) {
  const std::size_t d = ops.basis().dim();
  std::vector<std::vector<std::uint32_t>> out(d);
  std::vector<int> indeg(d, 0);
  for (const auto& op : ops.ops())
    for (auto [s, t] : op.map) {
      out[s].push_back(t);
      ++indeg[t];
    }
  std::vector<int> depth(d, 0);
  std::vector<std::uint32_t> queue;
  for (std::size_t s = 0; s < d; ++s)
    if (indeg[s] == 0) queue.push_back(static_cast<std::uint32_t>(s));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto s = queue[head];
    for (auto t : out[s]) {
      depth[t] = std::max(depth[t], depth[s] + 1);
      if (--indeg[t] == 0) queue.push_back(t);
    }
  }
  if (queue.size() != d) throw NumericalError("jump graph has a cycle; no finite-time ordering exists");
  return depth;
}

// (op index, target) per source position, sorted by op index.
std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> jumps_by_source(const JumpOperatorSet& ops) {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by(ops.basis().dim());
  for (std::size_t k = 0; k < ops.size(); ++k)
    for (auto [s, t] : ops.ops()[k].map) by[s].emplace_back(static_cast<std::uint32_t>(k), t);
  return by;
}

void check_trace(double before, double after, double limit) {
  if (!(std::abs(after - before) <= limit))
    throw NumericalError("trace drifted by " + std::to_string(after - before) + " during dissipative evolution");
}

}  // namespace

EvolveResult dissipative_evolve(const DensityMatrix& rho, const JumpOperatorSet& ops, const DissipativeOptions& opts) {
  check_options(opts);
  if (!(rho.basis() == ops.basis())) throw InvalidArgument("density matrix and jump operators use different bases");
  const std::size_t d = rho.dim();
  cstate x(rho.matrix().data(), rho.matrix().data() + rho.matrix().size());
  const double tr0 = rho.trace().real();
  Progress pr = integrate(x, Dissipator{ops, d}, opts);
  EvolveResult res{DensityMatrix(rho.basis()), pr.elapsed, pr.converged, pr.stationarity, pr.overlap_stationarity};
  std::copy(x.begin(), x.end(), res.rho.matrix().data());
  check_trace(tr0, res.rho.trace().real(), opts.trace_drift_limit);
  return res;
}

DiagonalResult dissipative_evolve_diagonal(const std::vector<double>& populations, const JumpOperatorSet& ops,
                                           const DissipativeOptions& opts) {
  check_options(opts);
  if (populations.size() != ops.basis().dim()) throw InvalidArgument("population vector does not match basis");
  rstate x = populations;
  double tr0 = 0.0;
  for (double v : x) tr0 += v;
  Progress pr = integrate(x, RateEquation{ops}, opts);
  double tr1 = 0.0;
  for (double v : x) tr1 += v;
  check_trace(tr0, tr1, opts.trace_drift_limit);
  return {std::move(x), pr.elapsed, pr.converged, pr.stationarity};
}

DensityMatrix dissipative_limit(const DensityMatrix& rho, const JumpOperatorSet& ops) {
  if (!(rho.basis() == ops.basis())) throw InvalidArgument("density matrix and jump operators use different bases");
  const std::size_t d = rho.dim();
  const auto depth = jump_depths(ops);
  const auto by = jumps_by_source(ops);
  const auto& dc = ops.domain_count();
  int max_depth = 0;
  for (int v : depth) max_depth = std::max(max_depth, v);
  std::vector<std::vector<std::uint32_t>> level(static_cast<std::size_t>(max_depth) + 1);
  for (std::size_t s = 0; s < d; ++s) level[static_cast<std::size_t>(depth[s])].push_back(static_cast<std::uint32_t>(s));

  DensityMatrix out = rho;
  auto& w = out.matrix();
  // A jump raises the depth of both indices, so pairs are final once every
  // pair of smaller depth sum has been drained.
  for (int sum = 0; sum <= 2 * max_depth; ++sum) {
    for (int da = std::max(0, sum - max_depth); da <= std::min(sum, max_depth); ++da) {
      for (auto a : level[static_cast<std::size_t>(da)]) {
        for (auto b : level[static_cast<std::size_t>(sum - da)]) {
          const cplx v = w(a, b);
          const double rate = 0.5 * (dc[a] + dc[b]);
          if (rate == 0.0 || v == cplx{}) continue;
          w(a, b) = 0.0;
          const cplx share = v / rate;
          const auto& ja = by[a];
          const auto& jb = by[b];
          std::size_t i = 0, j = 0;
          while (i < ja.size() && j < jb.size()) {
            if (ja[i].first < jb[j].first) {
              ++i;
            } else if (jb[j].first < ja[i].first) {
              ++j;
            } else {
              w(ja[i].second, jb[j].second) += share;
              ++i;
              ++j;
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<double> dissipative_limit_diagonal(const std::vector<double>& populations, const JumpOperatorSet& ops) {
  if (populations.size() != ops.basis().dim()) throw InvalidArgument("population vector does not match basis");
  const auto depth = jump_depths(ops);
  const auto by = jumps_by_source(ops);
  const auto& dc = ops.domain_count();
  std::vector<std::uint32_t> order(populations.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = static_cast<std::uint32_t>(s);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return depth[x] < depth[y]; });
  std::vector<double> p = populations;
  for (auto s : order) {
    if (dc[s] == 0 || p[s] == 0.0) continue;
    const double share = p[s] / dc[s];
    p[s] = 0.0;
    for (auto [op, t] : by[s]) p[t] += share;
  }
  return p;
}

UnitaryPropagator::UnitaryPropagator(const PxpHamiltonian& h, double theta) : theta_(theta) {
  if (!std::isfinite(theta) || theta < 0.0) throw InvalidArgument("theta must be finite and nonnegative");
  const Eigen::MatrixXd hd(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
  if (es.info() != Eigen::Success) throw NumericalError("PXP diagonalization failed");
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
  Eigen::VectorXcd phase(hd.rows());
  for (Eigen::Index k = 0; k < hd.rows(); ++k) phase(k) = std::exp(cplx(0.0, -theta * es.eigenvalues()(k)));
  u_ = v * phase.asDiagonal() * v.adjoint();
  const double err =
      u_.rows() ? (u_ * u_.adjoint() - Eigen::MatrixXcd::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff() : 0.0;
  if (err > 1e-10) throw NumericalError("unitary propagator not unitary within 1e-10");
}

void UnitaryPropagator::apply(DensityMatrix& rho) const {
  if (rho.matrix().rows() != u_.rows()) throw InvalidArgument("propagator and density matrix dimensions differ");
  Eigen::MatrixXcd tmp = u_ * rho.matrix();
  rho.matrix().noalias() = tmp * u_.adjoint();
}

DensityMatrix unitary_step(const DensityMatrix& rho, const PxpHamiltonian& h, double theta) {
  if (!(rho.basis() == h.basis)) throw InvalidArgument("density matrix and Hamiltonian use different bases");
  DensityMatrix out = rho;
  if (theta == 0.0) return out;
  UnitaryPropagator(h, theta).apply(out);
  return out;
}

}  // namespace misca
