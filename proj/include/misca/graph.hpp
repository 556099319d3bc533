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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace misca {

/// Basis-state index over at most 63 vertices: bit i is the state of vertex i.
using StateIndex = std::uint64_t;

inline constexpr int kDefaultEnumerationLimit = 26;

/// A length-N bit configuration. Vertex 0 is the leftmost character of the
/// bitstring form ("1010" activates vertices 0 and 2).
class Config {
 public:
  Config() = default;
  explicit Config(int n) : bits_(static_cast<std::size_t>(n), 0) {}

  static Config from_string(std::string_view bits);
  static Config from_index(StateIndex index, int n);

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const noexcept { return bits_[static_cast<std::size_t>(i)] != 0; }
  void set(int i, bool value) noexcept { bits_[static_cast<std::size_t>(i)] = value ? 1 : 0; }
  int count() const noexcept;

  std::string to_string() const;
  /// Requires size() <= 63.
  StateIndex to_index() const;

  friend bool operator==(const Config&, const Config&) = default;
  friend auto operator<=>(const Config& a, const Config& b) { return a.bits_ <=> b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

enum class IndependenceClass {
  NotIndependent,
  IndependentNonMaximal,
  MaximalNonMaximum,
  Maximum,
};

std::string_view to_string(IndependenceClass c);

/// Undirected simple graph on vertices 0..n-1.
class Graph {
 public:
  /// Edges are 0-based; throws InvalidArgument on self-loops, duplicates or
  /// out-of-range endpoints.
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int num_vertices() const noexcept { return n_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  /// Edges with first < second, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  double average_degree() const noexcept { return 2.0 * num_edges() / n_; }
  bool has_edge(int i, int j) const;

  /// Neighbour bitmask of vertex i; only valid when num_vertices() <= 63.
  StateIndex neighbor_mask(int i) const { return neighbor_masks_[static_cast<std::size_t>(i)]; }
  bool fits_state_index() const noexcept { return n_ <= 63; }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<StateIndex> neighbor_masks_;
};

// --- independent-set predicates ------------------------------------------

bool is_independent(const Graph& g, const Config& c);
/// Independent, and every inactive vertex has an active neighbour. This is
/// the single absorption test shared by the PCA engine and the exact chain.
bool is_maximal_independent(const Graph& g, const Config& c);

bool is_independent(const Graph& g, StateIndex s);
bool is_maximal_independent(const Graph& g, StateIndex s);

/// Classification against a precomputed maximum cardinality.
IndependenceClass classify(const Graph& g, const Config& c, int mis_size);
IndependenceClass classify(const Graph& g, StateIndex s, int mis_size);
/// Computes the maximum cardinality by exhaustive search.
IndependenceClass classify(const Graph& g, const Config& c);

// --- exhaustive oracles --------------------------------------------------

enum class EnumerationMethod {
  Scan,      ///< test all 2^n configurations
  Pivoting,  ///< Bron-Kerbosch with pivoting on the complement graph
};

/// All maximal independent sets, sorted by bitstring. Throws LimitExceeded
/// when g has more than `limit` vertices.
std::vector<Config> enumerate_maximal_sets(const Graph& g,
                                           EnumerationMethod method = EnumerationMethod::Scan,
                                           int limit = kDefaultEnumerationLimit);

/// Maximum independent-set cardinality by exhaustive enumeration of all
/// independent sets.
int mis_size(const Graph& g, int limit = kDefaultEnumerationLimit);

/// -sum_i s_i + u * sum_{(i,j) in E} s_i s_j
double mis_energy(const Graph& g, const Config& c, double u);

// --- generators ------------------------------------------------------------

/// Uniform G(n, M) with M = round(k_target * n / 2); deterministic per seed.
Graph gen_random_graph(int n, double k_target, std::uint64_t seed);
/// Path 0-1-...-(n-1).
Graph gen_open_chain(int n);
/// n points uniform in [0, box]^2, edge iff distance <= radius.
Graph gen_unit_disk(int n, double radius, double box, std::uint64_t seed);

// --- file formats ----------------------------------------------------------

/// Parses either the "N M" + "i j" edge list (1-based) or the JSON form
/// {"n": N, "edges": [[i, j], ...]} (1-based).
Graph parse_graph(std::string_view text);
Graph read_graph(const std::string& path);
std::string to_edge_list(const Graph& g);
std::string to_json(const Graph& g);

// --- built-in fixtures -----------------------------------------------------

/// "four-node", "house", or "chain-<n>".
Graph fixture(std::string_view name);
/// Name of the built-in fixture isomorphic to g, if any (n <= 8 only).
std::optional<std::string> match_fixture(const Graph& g);

}  // namespace misca
