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

#include "misca/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "misca/error.hpp"
#include "misca/rng.hpp"

namespace misca {

namespace {

void require_length(const Graph& g, const Config& c) {
  if (c.size() != g.num_vertices()) {
    throw InvalidArgument("configuration length " + std::to_string(c.size()) +
                          " does not match graph with " + std::to_string(g.num_vertices()) +
                          " vertices");
  }
}

void require_limit(const Graph& g, int limit) {
  if (g.num_vertices() > limit) {
    throw LimitExceeded("graph has " + std::to_string(g.num_vertices()) +
                            " vertices, exhaustive enumeration limit is " + std::to_string(limit),
                        limit);
  }
  if (g.num_vertices() > 63) {
    throw LimitExceeded("exhaustive enumeration supports at most 63 vertices", 63);
  }
}

}  // namespace

// --- Config ----------------------------------------------------------------

Config Config::from_string(std::string_view bits) {
  Config c(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw InvalidArgument("configuration must be a bitstring, got '" + std::string(bits) + "'");
    }
    c.bits_[i] = bits[i] == '1' ? 1 : 0;
  }
  return c;
}

Config Config::from_index(StateIndex index, int n) {
  Config c(n);
  for (int i = 0; i < n; ++i) c.bits_[static_cast<std::size_t>(i)] = (index >> i) & 1U;
  return c;
}

int Config::count() const noexcept {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string Config::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

StateIndex Config::to_index() const {
  if (bits_.size() > 63) throw LimitExceeded("configuration too long for a state index", 63);
  StateIndex s = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) s |= StateIndex{bits_[i]} << i;
  return s;
}

std::string_view to_string(IndependenceClass c) {
  switch (c) {
    case IndependenceClass::NotIndependent: return "not_independent";
    case IndependenceClass::IndependentNonMaximal: return "independent_non_maximal";
    case IndependenceClass::MaximalNonMaximum: return "maximal_non_maximum";
    case IndependenceClass::Maximum: return "maximum";
  }
  return "unknown";
}

// --- Graph -----------------------------------------------------------------

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n), adjacency_(static_cast<std::size_t>(std::max(n, 0))) {
  if (n < 1) throw InvalidArgument("graph needs at least one vertex");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw InvalidArgument("edge (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                            ") out of range for " + std::to_string(n) + " vertices");
    }
    if (a == b) throw InvalidArgument("self-loop at vertex " + std::to_string(a + 1));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw InvalidArgument("duplicate edge (" + std::to_string(dup->first + 1) + "," +
                          std::to_string(dup->second + 1) + ")");
  }
  edges_ = std::move(edges);
  for (const auto& [a, b] : edges_) {
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  if (n_ <= 63) {
    neighbor_masks_.assign(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) {
      for (int j : adjacency_[static_cast<std::size_t>(i)]) neighbor_masks_[static_cast<std::size_t>(i)] |= StateIndex{1} << j;
    }
  }
}

bool Graph::has_edge(int i, int j) const {
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

// --- predicates ------------------------------------------------------------

bool is_independent(const Graph& g, const Config& c) {
  require_length(g, c);
  for (const auto& [a, b] : g.edges()) {
    if (c[a] && c[b]) return false;
  }
  return true;
}

bool is_maximal_independent(const Graph& g, const Config& c) {
  if (!is_independent(g, c)) return false;
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (c[i]) continue;
    bool blocked = false;
    for (int j : g.neighbors(i)) {
      if (c[j]) {
        blocked = true;
        break;
      }
    }
    if (!blocked) return false;
  }
  return true;
}

bool is_independent(const Graph& g, StateIndex s) {
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (((s >> i) & 1U) && (g.neighbor_mask(i) & s)) return false;
  }
  return true;
}

bool is_maximal_independent(const Graph& g, StateIndex s) {
  for (int i = 0; i < g.num_vertices(); ++i) {
    const bool active = (s >> i) & 1U;
    const bool blocked = (g.neighbor_mask(i) & s) != 0;
    if (active == blocked) return false;  // conflict, or a free inactive vertex
  }
  return true;
}

IndependenceClass classify(const Graph& g, StateIndex s, int mis) {
  if (!is_independent(g, s)) return IndependenceClass::NotIndependent;
  if (!is_maximal_independent(g, s)) return IndependenceClass::IndependentNonMaximal;
  return std::popcount(s) == mis ? IndependenceClass::Maximum : IndependenceClass::MaximalNonMaximum;
}

IndependenceClass classify(const Graph& g, const Config& c, int mis) {
  if (!is_independent(g, c)) return IndependenceClass::NotIndependent;
  if (!is_maximal_independent(g, c)) return IndependenceClass::IndependentNonMaximal;
  return c.count() == mis ? IndependenceClass::Maximum : IndependenceClass::MaximalNonMaximum;
}

IndependenceClass classify(const Graph& g, const Config& c) {
  require_length(g, c);
  return classify(g, c, mis_size(g));
}

// --- exhaustive oracles ----------------------------------------------------

namespace {

std::vector<StateIndex> maximal_by_scan(const Graph& g) {
  std::vector<StateIndex> out;
  const StateIndex total = StateIndex{1} << g.num_vertices();
  for (StateIndex s = 0; s < total; ++s) {
    if (is_maximal_independent(g, s)) out.push_back(s);
  }
  return out;
}

// Maximal independent sets are the maximal cliques of the complement graph.
void bron_kerbosch(const std::vector<StateIndex>& comp, StateIndex r, StateIndex p, StateIndex x,
                   std::vector<StateIndex>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  StateIndex px = p | x;
  int pivot = std::countr_zero(px);
  int best = -1;
  for (StateIndex m = px; m; m &= m - 1) {
    int u = std::countr_zero(m);
    int c = std::popcount(p & comp[static_cast<std::size_t>(u)]);
    if (c > best) {
      best = c;
      pivot = u;
    }
  }
  StateIndex candidates = p & ~comp[static_cast<std::size_t>(pivot)];
  for (StateIndex m = candidates; m; m &= m - 1) {
    int v = std::countr_zero(m);
    StateIndex bit = StateIndex{1} << v;
    bron_kerbosch(comp, r | bit, p & comp[static_cast<std::size_t>(v)], x & comp[static_cast<std::size_t>(v)], out);
    p &= ~bit;
    x |= bit;
  }
}

std::vector<StateIndex> maximal_by_pivoting(const Graph& g) {
  const int n = g.num_vertices();
  const StateIndex all = (n == 64) ? ~StateIndex{0} : (StateIndex{1} << n) - 1;
  std::vector<StateIndex> comp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = all & ~g.neighbor_mask(i) & ~(StateIndex{1} << i);
  std::vector<StateIndex> out;
  bron_kerbosch(comp, 0, all, 0, out);
  return out;
}

}  // namespace

std::vector<Config> enumerate_maximal_sets(const Graph& g, EnumerationMethod method, int limit) {
  require_limit(g, limit);
  auto states = method == EnumerationMethod::Scan ? maximal_by_scan(g) : maximal_by_pivoting(g);
  std::vector<Config> out;
  out.reserve(states.size());
  for (StateIndex s : states) out.push_back(Config::from_index(s, g.num_vertices()));
  std::sort(out.begin(), out.end());
  return out;
}

int mis_size(const Graph& g, int limit) {
  require_limit(g, limit);
  const int n = g.num_vertices();
  const StateIndex all = (StateIndex{1} << n) - 1;
  int best = 0;
  // Visits every independent set exactly once: branch on the lowest
  // undecided vertex (take it and drop its neighbours, or leave it out).
  std::function<void(StateIndex, int)> visit = [&](StateIndex undecided, int size) {
    if (undecided == 0) {
      best = std::max(best, size);
      return;
    }
    int v = std::countr_zero(undecided);
    StateIndex rest = undecided & (undecided - 1);
    visit(rest & ~g.neighbor_mask(v), size + 1);
    visit(rest, size);
  };
  visit(all, 0);
  return best;
}

double mis_energy(const Graph& g, const Config& c, double u) {
  require_length(g, c);
  if (!(u > 0)) throw InvalidArgument("penalty weight u must be positive");
  double energy = -static_cast<double>(c.count());
  for (const auto& [a, b] : g.edges()) {
    if (c[a] && c[b]) energy += u;
  }
  return energy;
}

// --- generators ------------------------------------------------------------

Graph gen_random_graph(int n, double k_target, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random graph needs n >= 1");
  if (!(k_target >= 0) || k_target > n - 1) {
    throw InvalidArgument("average degree " + std::to_string(k_target) + " infeasible for n = " +
                          std::to_string(n) + " (need 0 <= k <= n-1)");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  const auto m = static_cast<std::uint64_t>(std::llround(k_target * n / 2.0));
  if (m > total) {
    throw InvalidArgument("edge count " + std::to_string(m) + " exceeds the " + std::to_string(total) +
                          " possible edges");
  }
  // Floyd's sampling of an m-subset of pair indices, uniform over subsets.
  std::mt19937_64 engine(seed);
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = total - m; j < total; ++j) {
    std::uint64_t t = uniform_below(engine, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(chosen.size());
  // Pair index enumerates (0,1),(0,2),...,(0,n-1),(1,2),...
  std::uint64_t row_start = 0;
  int row = 0;
  for (std::uint64_t idx : chosen) {
    while (idx >= row_start + static_cast<std::uint64_t>(n - 1 - row)) {
      row_start += static_cast<std::uint64_t>(n - 1 - row);
      ++row;
    }
    edges.emplace_back(row, row + 1 + static_cast<int>(idx - row_start));
  }
  return Graph(n, std::move(edges));
}

Graph gen_open_chain(int n) {
  if (n < 1) throw InvalidArgument("chain needs n >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

Graph gen_unit_disk(int n, double radius, double box, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("unit-disk graph needs n >= 1");
  if (!(radius > 0) || !(box > 0)) throw InvalidArgument("unit-disk radius and box must be positive");
  std::mt19937_64 engine(seed);
  std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
  for (auto& [x, y] : pts) {
    x = uniform_unit(engine) * box;
    y = uniform_unit(engine) * box;
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = pts[static_cast<std::size_t>(i)].first - pts[static_cast<std::size_t>(j)].first;
      const double dy = pts[static_cast<std::size_t>(i)].second - pts[static_cast<std::size_t>(j)].second;
      if (std::hypot(dx, dy) <= radius) edges.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(edges));
}

}  // namespace misca
