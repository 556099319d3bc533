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

#include "misca/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <json.hpp>

#include "misca/error.hpp"

namespace misca {

namespace {

void check_open_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("p must lie in (0, 1) for the exact chain");
}

void check_limit(const Graph& g, int limit) {
  if (g.num_vertices() > limit)
    throw LimitExceeded("exact chain limited to " + std::to_string(limit) + " vertices", limit);
}

// Deterministic part of the next state and the mask of free vertices.
std::pair<StateIndex, StateIndex> split_row(const Graph& g, StateIndex s) {
  StateIndex base = 0;
  StateIndex free = 0;
  for (int i = 0; i < g.num_vertices(); ++i) {
    const StateIndex bit = StateIndex{1} << i;
    if (s & g.neighbor_mask(i)) continue;
    if (s & bit)
      base |= bit;
    else
      free |= bit;
  }
  return {base, free};
}

bool is_kernel_absorbing(const Graph& g, StateIndex s) {
  auto [base, free] = split_row(g, s);
  return free == 0 && base == s;
}


// Subtraction-free state elimination over the transient block. Removing k
// reroutes i -> k -> j through P_ik P_kj / S_k with S_k the outflow of k
// excluding its self-loop; r carries expected steps per visit.
struct Elimination {
  std::vector<double> absorb;  // absorption probability per absorber
  double steps;
};

Elimination eliminate(std::size_t m, std::size_t na, const std::vector<std::vector<std::pair<std::size_t, double>>>& trans,
                      const std::vector<std::vector<std::pair<std::size_t, double>>>& abs) {
  std::vector<double> pt(m * m, 0.0), pa(m * na, 0.0), r(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto [j, w] : trans[i]) pt[i * m + j] += w;
    for (auto [a, w] : abs[i]) pa[i * na + a] += w;
  }
  std::vector<char> alive(m, 1);
  std::vector<std::size_t> succ, succ_a;
  for (std::size_t k = m; k-- > 1;) {
    succ.clear();
    succ_a.clear();
    double out = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != k && alive[j] && pt[k * m + j] > 0.0) {
        succ.push_back(j);
        out += pt[k * m + j];
      }
    for (std::size_t a = 0; a < na; ++a)
      if (pa[k * na + a] > 0.0) {
        succ_a.push_back(a);
        out += pa[k * na + a];
      }
    alive[k] = 0;
    if (!(out > 0.0)) continue;  // k is never left; unreachable from live states
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      const double pik = pt[i * m + k];
      if (pik == 0.0) continue;
      const double f = pik / out;
      pt[i * m + k] = 0.0;
      for (auto j : succ) pt[i * m + j] += f * pt[k * m + j];
      for (auto a : succ_a) pa[i * na + a] += f * pa[k * na + a];
      r[i] += f * r[k];
    }
  }
  double out0 = 0.0;
  for (std::size_t a = 0; a < na; ++a) out0 += pa[a];
  if (!(out0 > 0.0)) throw NumericalError("start state is never absorbed");
  Elimination e{std::vector<double>(na), r[0] / out0};
  for (std::size_t a = 0; a < na; ++a) e.absorb[a] = pa[a] / out0;
  return e;
}

}  // namespace

LocalDistribution local_theta(const Graph& g, int i, const std::vector<std::pair<int, bool>>& neighborhood,
                              bool own, double p) {
  if (i < 0 || i >= g.num_vertices()) throw InvalidArgument("vertex out of range");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  std::vector<int> given;
  given.reserve(neighborhood.size());
  bool any_active = false;
  for (auto [v, b] : neighborhood) {
    given.push_back(v);
    any_active = any_active || b;
  }
  std::sort(given.begin(), given.end());
  if (given != g.neighbors(i)) throw InvalidArgument("neighborhood must list exactly the neighbours of vertex " +
                                                     std::to_string(i));
  if (any_active) return {1.0, 0.0};
  if (own) return {0.0, 1.0};
  return {1.0 - p, p};
}

std::vector<std::pair<StateIndex, double>> transition_row(const Graph& g, StateIndex s, double p) {
  auto [base, free] = split_row(g, s);
  const int f = std::popcount(free);
  std::vector<int> free_bits;
  free_bits.reserve(static_cast<std::size_t>(f));
  for (int i = 0; i < g.num_vertices(); ++i)
    if (free & (StateIndex{1} << i)) free_bits.push_back(i);

  std::vector<std::pair<StateIndex, double>> row;
  row.reserve(std::size_t{1} << f);
  const double q = 1.0 - p;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << f); ++m) {
    StateIndex t = base;
    int on = 0;
    for (int k = 0; k < f; ++k) {
      if (m & (std::uint64_t{1} << k)) {
        t |= StateIndex{1} << free_bits[static_cast<std::size_t>(k)];
        ++on;
      }
    }
    row.emplace_back(t, std::pow(p, on) * std::pow(q, f - on));
  }
  return row;
}

TransitionRow transition_row(const Graph& g, const Config& s, double p, int limit) {
  check_limit(g, limit);
  if (s.size() != g.num_vertices()) throw InvalidArgument("configuration length does not match graph");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  TransitionRow out{s, {}};
  for (auto [t, w] : transition_row(g, s.to_index(), p))
    if (w > 0.0) out.successors.emplace_back(Config::from_index(t, g.num_vertices()), w);
  std::sort(out.successors.begin(), out.successors.end());
  return out;
}

std::vector<Config> kernel_absorbing_states(const Graph& g, int limit) {
  check_limit(g, limit);
  std::vector<Config> out;
  const StateIndex total = StateIndex{1} << g.num_vertices();
  for (StateIndex s = 0; s < total; ++s)
    if (is_kernel_absorbing(g, s)) out.push_back(Config::from_index(s, g.num_vertices()));
  std::sort(out.begin(), out.end());
  return out;
}

AbsorptionReport absorption_analysis(const Graph& g, double p, int limit) {
  check_limit(g, limit);
  check_open_p(p);
  const int n = g.num_vertices();
  const std::size_t total = std::size_t{1} << n;

  // Reachable states from 0 in BFS order; transient ones get consecutive ids.
  constexpr std::int32_t kUnseen = -1;
  std::vector<std::int32_t> seen(total, kUnseen);
  std::vector<StateIndex> order{0};
  seen[0] = 0;
  std::vector<std::vector<std::pair<StateIndex, double>>> rows;
  std::vector<StateIndex> transient;
  std::vector<StateIndex> absorbing;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const StateIndex s = order[head];
    if (is_kernel_absorbing(g, s)) {
      absorbing.push_back(s);
      continue;
    }
    transient.push_back(s);
    rows.push_back(transition_row(g, s, p));
    for (auto [t, w] : rows.back()) {
      if (seen[t] == kUnseen) {
        seen[t] = 0;
        order.push_back(t);
      }
    }
  }
  std::sort(absorbing.begin(), absorbing.end());

  std::vector<std::int32_t> tid(total, kUnseen);
  for (std::size_t k = 0; k < transient.size(); ++k) tid[transient[k]] = static_cast<std::int32_t>(k);
  std::vector<std::int32_t> aid(total, kUnseen);
  for (std::size_t k = 0; k < absorbing.size(); ++k) aid[absorbing[k]] = static_cast<std::int32_t>(k);

  AbsorptionReport rep;
  rep.p = p;
  rep.reachable_states = order.size();
  rep.transient_states = transient.size();
  const int mis = mis_size(g, limit);

  if (transient.empty()) {  // only the empty graph on zero vertices
    rep.absorbers.emplace_back(Config::from_index(0, n), 1.0);
    rep.p_mis = 1.0;
    return rep;
  }

  if (transient.size() <= kEliminationLimit) {
    std::vector<std::vector<std::pair<std::size_t, double>>> tr(transient.size()), ab(transient.size());
    for (std::size_t i = 0; i < transient.size(); ++i)
      for (auto [t, w] : rows[i]) {
        if (tid[t] != kUnseen)
          tr[i].emplace_back(static_cast<std::size_t>(tid[t]), w);
        else
          ab[i].emplace_back(static_cast<std::size_t>(aid[t]), w);
      }
    const Elimination e = eliminate(transient.size(), absorbing.size(), tr, ab);
    rep.method = "elimination";
    rep.expected_steps = e.steps;
    for (std::size_t k = 0; k < absorbing.size(); ++k) {
      rep.absorbers.emplace_back(Config::from_index(absorbing[k], n), e.absorb[k]);
      (std::popcount(absorbing[k]) == mis ? rep.p_mis : rep.p_mis_complement) += e.absorb[k];
    }
    std::sort(rep.absorbers.begin(), rep.absorbers.end());
    return rep;
  }
  rep.method = "sparse_lu";

  // A = (I - Q)^T, so A x = e_0 gives expected visits to each transient state.
  const auto m = static_cast<Eigen::Index>(transient.size());
  std::vector<Eigen::Triplet<double>> trip;
  // The diagonal 1 - Q_ii is summed from the outflow so no cancellation occurs.
  for (std::size_t i = 0; i < transient.size(); ++i) {
    double outflow = 0.0;
    for (auto [t, w] : rows[i]) {
      if (t == transient[i]) continue;
      outflow += w;
      if (tid[t] != kUnseen) trip.emplace_back(tid[t], static_cast<Eigen::Index>(i), -w);
    }
    trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), outflow);
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(m);
  e0(tid[0]) = 1.0;

  const Eigen::SparseMatrix<double> at = a.transpose();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  const bool direct = lu.info() == Eigen::Success;

  // Residual rhs - M v with products accumulated in long double.
  auto residual = [&](const Eigen::SparseMatrix<double>& mat, const Eigen::VectorXd& rhs, const Eigen::VectorXd& v) {
    std::vector<long double> acc(static_cast<std::size_t>(m), 0.0L);
    for (int k = 0; k < mat.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
        acc[static_cast<std::size_t>(it.row())] += static_cast<long double>(it.value()) * v(it.col());
    Eigen::VectorXd r(m);
    for (Eigen::Index k = 0; k < m; ++k)
      r(k) = static_cast<double>(static_cast<long double>(rhs(k)) - acc[static_cast<std::size_t>(k)]);
    return r;
  };
  // Solves A v = rhs (or A^T v = rhs) with mixed-precision refinement.
  auto solve = [&](const Eigen::VectorXd& rhs, bool transposed, double& res) {
    const Eigen::SparseMatrix<double>& mat = transposed ? at : a;
    Eigen::VectorXd v;
    if (direct) {
      auto step = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
        return transposed ? Eigen::VectorXd(lu.transpose().solve(b)) : Eigen::VectorXd(lu.solve(b));
      };
      v = step(rhs);
      if (v.allFinite()) {
        Eigen::VectorXd r = residual(mat, rhs, v);
        for (int iter = 0; iter < 5 && r.lpNorm<Eigen::Infinity>() > 0.0; ++iter) {
          const Eigen::VectorXd dv = step(r);
          if (!dv.allFinite()) break;
          const Eigen::VectorXd cand = v + dv;
          const Eigen::VectorXd r2 = residual(mat, rhs, cand);
          if (!(r2.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>())) break;
          v = cand;
          r = r2;
        }
        res = std::max(res, r.lpNorm<Eigen::Infinity>());
        return v;
      }
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> it;
    it.setTolerance(1e-12);
    it.setMaxIterations(10 * m + 1000);
    it.compute(mat);
    v = it.solve(rhs);
    if (it.info() != Eigen::Success || !v.allFinite())
      throw NumericalError("absorption solve failed: I - Q is singular or too ill-conditioned (estimated error " +
                           std::to_string(it.error()) + ")");
    res = std::max(res, residual(mat, rhs, v).lpNorm<Eigen::Infinity>());
    return v;
  };

  // x = expected visits from 0: per-absorber probabilities and mean steps.
  const Eigen::VectorXd x = solve(e0, false, rep.residual);
  // u = P(absorbed in a class | start), bounded in [0, 1], so the class
  // totals do not inherit the rounding of the large visit counts.
  Eigen::VectorXd rhs_mis = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd rhs_non = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < transient.size(); ++i)
    for (auto [t, w] : rows[i])
      if (aid[t] != kUnseen) (std::popcount(t) == mis ? rhs_mis : rhs_non)(static_cast<Eigen::Index>(i)) += w;
  const Eigen::VectorXd u_mis = solve(rhs_mis, true, rep.residual);
  const Eigen::VectorXd u_non = solve(rhs_non, true, rep.residual);
  rep.p_mis = u_mis(tid[0]);
  rep.p_mis_complement = u_non(tid[0]);

  std::vector<double> b(absorbing.size(), 0.0);
  double steps = 0.0;
  for (std::size_t i = 0; i < transient.size(); ++i) {
    steps += x(static_cast<Eigen::Index>(i));
    for (auto [t, w] : rows[i])
      if (aid[t] != kUnseen) b[static_cast<std::size_t>(aid[t])] += x(static_cast<Eigen::Index>(i)) * w;
  }
  rep.expected_steps = steps;
  for (std::size_t k = 0; k < absorbing.size(); ++k)
    rep.absorbers.emplace_back(Config::from_index(absorbing[k], n), b[k]);
  std::sort(rep.absorbers.begin(), rep.absorbers.end());
  return rep;
}

std::string to_json(const AbsorptionReport& r) {
  nlohmann::ordered_json j;
  j["p"] = r.p;
  j["p_mis"] = r.p_mis;
  j["p_mis_complement"] = r.p_mis_complement;
  j["expected_steps"] = r.expected_steps;
  j["reachable_states"] = r.reachable_states;
  j["transient_states"] = r.transient_states;
  j["method"] = r.method;
  j["residual"] = r.residual;
  nlohmann::ordered_json abs = nlohmann::ordered_json::object();
  for (const auto& [c, w] : r.absorbers) abs[c.to_string()] = w;
  j["absorbers"] = std::move(abs);
  return j.dump();
}

double closed_form_4node(double p) {
  const double q = 1.0 - p;
  const double num = p * p * p * q + 2 * p * p * q * q + 3 * p * q * q * q;
  const double den = p * p * p * q + 2 * p * p * q * q + 4 * p * q * q * q;
  return num / den;
}

double closed_form_house(double p) {
  const double q = 1.0 - p;
  auto pw = [](double v, int k) { return std::pow(v, k); };
  const double g1 = pw(p, 7) + 7 * pw(p, 6) * q + 18 * pw(p, 5) * q * q + 22 * pw(p, 4) * pw(q, 3) +
                    13 * pw(p, 3) * pw(q, 4) + 10 * p * p * pw(q, 5) + pw(q, 7);
  const double g2 = pw(p, 4) + 3 * pw(p, 3) * q + 4 * p * p * q * q + pw(q, 4);
  const double g3 = pw(p, 3) + 2 * p * p * q + pw(q, 3);
  const double a = 1 - g1;
  const double b = 1 - g2;
  const double c = 1 - g3;
  const double d = 1 - p * p - q * q;
  const double w5 = pw(p, 5) * q * q + 2 * pw(p, 4) * pw(q, 3) + 2 * pw(p, 3) * pw(q, 4) + p * pw(q, 6);
  const double w4 = pw(p, 4) * pw(q, 3) + 2 * pw(p, 3) * pw(q, 4) + p * pw(q, 6);
  return 2 * pw(p, 3) * pw(q, 4) / a + 2 * w5 / a * 2 * p * pw(q, 3) / b +
         2 * w5 / a * (pw(p, 3) * q + p * pw(q, 3)) / b * 2 * p * q / d + 2 * w4 / a * p * p * q / c +
         (pw(p, 4) * pw(q, 3) + p * p * pw(q, 5)) / a * 2 * p * q / d + 2 * w4 / a * 2 * p * q * q / c +
         4 * p * p * pw(q, 5) / a;
}

}  // namespace misca
