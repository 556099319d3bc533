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


// Reference implementations used only by the tests. Each one recomputes a
// quantity from the update rule or the master equation directly, with dense
// linear algebra and no code shared with the library.
#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;

// Bit i of a state is vertex i.
inline std::vector<std::uint64_t> adjacency(int n, const Edges& edges) {
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)] |= std::uint64_t{1} << b;
    adj[static_cast<std::size_t>(b)] |= std::uint64_t{1} << a;
  }
  return adj;
}

inline bool independent(const std::vector<std::uint64_t>& adj, std::uint64_t s) {
  for (std::size_t i = 0; i < adj.size(); ++i)
    if ((s >> i & 1) && (adj[i] & s)) return false;
  return true;
}

inline bool maximal(const std::vector<std::uint64_t>& adj, std::uint64_t s) {
  if (!independent(adj, s)) return false;
  for (std::size_t i = 0; i < adj.size(); ++i)
    if (!(s >> i & 1) && !(adj[i] & s)) return false;
  return true;
}

inline std::vector<std::uint64_t> maximal_sets(int n, const Edges& edges) {
  auto adj = adjacency(n, edges);
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s)
    if (maximal(adj, s)) out.push_back(s);
  return out;
}

inline int max_cardinality(int n, const Edges& edges) {
  int best = 0;
  for (auto s : maximal_sets(n, edges)) best = std::max(best, std::popcount(s));
  return best;
}

// One synchronous step as a full 2^n x 2^n column-stochastic matrix, built
// vertex by vertex from the local rule.
inline Eigen::MatrixXd transition_matrix(int n, const Edges& edges, double p) {
  auto adj = adjacency(n, edges);
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t s = 0; s < dim; ++s) {
    for (std::uint64_t to = 0; to < dim; ++to) {
      double prob = 1.0;
      for (int i = 0; i < n && prob > 0; ++i) {
        const bool next = to >> i & 1;
        double one;
        if (adj[static_cast<std::size_t>(i)] & s)
          one = 0.0;
        else if (s >> i & 1)
          one = 1.0;
        else
          one = p;
        prob *= next ? one : 1.0 - one;
      }
      t(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(s)) = prob;
    }
  }
  return t;
}

struct Absorption {
  std::map<std::uint64_t, double> absorbers;
  double p_mis = 0;
  double expected_steps = 0;
};

// Absorption from the empty state by a dense solve over every state.
inline Absorption absorption(int n, const Edges& edges, double p) {
  const Eigen::MatrixXd t = transition_matrix(n, edges, p);
  const Eigen::Index dim = t.rows();
  std::vector<Eigen::Index> trans, abs;
  for (Eigen::Index s = 0; s < dim; ++s) (t(s, s) == 1.0 ? abs : trans).push_back(s);
  const auto nt = static_cast<Eigen::Index>(trans.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nt, nt);
  Eigen::MatrixXd r(nt, static_cast<Eigen::Index>(abs.size()));
  for (Eigen::Index i = 0; i < nt; ++i) {
    for (Eigen::Index j = 0; j < nt; ++j) a(i, j) -= t(trans[j], trans[i]);
    for (std::size_t j = 0; j < abs.size(); ++j) r(i, static_cast<Eigen::Index>(j)) = t(abs[j], trans[i]);
  }
  const auto lu = a.partialPivLu();
  const Eigen::MatrixXd b = lu.solve(r);
  const Eigen::VectorXd steps = lu.solve(Eigen::VectorXd::Ones(nt));
  Absorption out;
  const int best = max_cardinality(n, edges);
  for (std::size_t j = 0; j < abs.size(); ++j) {
    const double v = b(0, static_cast<Eigen::Index>(j));
    out.absorbers[static_cast<std::uint64_t>(abs[j])] = v;
    if (std::popcount(static_cast<std::uint64_t>(abs[j])) == best) out.p_mis += v;
  }
  out.expected_steps = steps(0);
  return out;
}

// Four-vertex fixture solved by hand from the rule (q = 1 - p).
inline double four_node_rule(double p) {
  const double q = 1 - p;
  const double num = p * p * p * q + p * p * p * q * q + 2 * p * p * q * q + 3 * p * q * q * q;
  return num / (num + p * q * q * q);
}

// Vacuum-started dissipative steady state: each free vertex switches on at
// unit rate, so the absorbed set is the greedy set of a uniformly random
// vertex order. Exact by enumerating all n! orders.
inline std::map<std::uint64_t, double> random_order_greedy(int n, const Edges& edges) {
  auto adj = adjacency(n, edges);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::map<std::uint64_t, double> count;
  double total = 0;
  do {
    std::uint64_t s = 0;
    for (int v : order)
      if (!(adj[static_cast<std::size_t>(v)] & s)) s |= std::uint64_t{1} << v;
    count[s] += 1;
    total += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& [s, c] : count) c /= total;
  return count;
}

// Dense jump operators over the full basis: On_i switches i on when i and its
// neighbourhood are quiet; Off_{i,c} switches i off when its neighbours read c != 0.
inline std::vector<Eigen::MatrixXd> jump_operators(int n, const Edges& edges) {
  auto adj = adjacency(n, edges);
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::MatrixXd> ops;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    const std::uint64_t nb = adj[static_cast<std::size_t>(i)];
    Eigen::MatrixXd on = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s)
      if (!(static_cast<std::uint64_t>(s) & (bit | nb))) on(static_cast<Eigen::Index>(s | bit), s) = 1;
    ops.push_back(on);
    // Enumerate nonzero submasks of nb.
    for (std::uint64_t c = nb; c; c = (c - 1) & nb) {
      Eigen::MatrixXd off = Eigen::MatrixXd::Zero(dim, dim);
      for (Eigen::Index s = 0; s < dim; ++s) {
        const auto u = static_cast<std::uint64_t>(s);
        if ((u & bit) && (u & nb) == c) off(static_cast<Eigen::Index>(u & ~bit), s) = 1;
      }
      ops.push_back(off);
    }
  }
  return ops;
}

// Liouvillian acting on column-major vec(rho).
inline Eigen::MatrixXcd liouvillian(const std::vector<Eigen::MatrixXd>& ops) {
  const Eigen::Index dim = ops.front().rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (const auto& op : ops) {
    const Eigen::MatrixXcd c = op.cast<std::complex<double>>();
    const Eigen::MatrixXcd cc = c.adjoint() * c;
    l += Eigen::kroneckerProduct(c.conjugate(), c);
    l -= 0.5 * Eigen::kroneckerProduct(id, cc);
    l -= 0.5 * Eigen::kroneckerProduct(cc.transpose(), id);
  }
  return l;
}

inline Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& liou, const Eigen::MatrixXcd& rho, double t) {
  const Eigen::Index dim = rho.rows();
  const Eigen::MatrixXcd prop = (liou * t).exp();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim * dim);
  Eigen::VectorXcd w = prop * v;
  return Eigen::Map<Eigen::MatrixXcd>(w.data(), dim, dim);
}

// PXP Hamiltonian over the full basis: X_i gated by quiet neighbours.
inline Eigen::MatrixXd pxp(int n, const Edges& edges) {
  auto adj = adjacency(n, edges);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index s = 0; s < dim; ++s)
      if (!(static_cast<std::uint64_t>(s) & adj[static_cast<std::size_t>(i)]))
        h(static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) ^ (std::uint64_t{1} << i)), s) += 1;
  return h;
}

inline Eigen::MatrixXcd unitary(const Eigen::MatrixXd& h, double theta) {
  const Eigen::MatrixXcd a = std::complex<double>(0, -theta) * h.cast<std::complex<double>>();
  return a.exp();
}

}  // namespace oracle
