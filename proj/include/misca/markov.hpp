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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "misca/graph.hpp"

namespace misca {

inline constexpr int kDefaultExactLimit = 20;

/// Distribution of a vertex's next state.
struct LocalDistribution {
  double prob0 = 0;
  double prob1 = 0;
};

/// The local rule for vertex i given the states of exactly its neighbours
/// (pairs of vertex, state) and its own state.
LocalDistribution local_theta(const Graph& g, int i, const std::vector<std::pair<int, bool>>& neighborhood,
                              bool own, double p);

struct TransitionRow {
  Config source;
  std::vector<std::pair<Config, double>> successors;  ///< sorted by bitstring
};

/// Row of the one-step kernel: product of local_theta over vertices. Only
/// free vertices branch, so the row has 2^f entries.
TransitionRow transition_row(const Graph& g, const Config& s, double p, int limit = kDefaultExactLimit);

/// Same row over state indices, unsorted.
std::vector<std::pair<StateIndex, double>> transition_row(const Graph& g, StateIndex s, double p);

/// States whose kernel row is {s: 1}, found by scanning all 2^n rows.
std::vector<Config> kernel_absorbing_states(const Graph& g, int limit = kDefaultExactLimit);

struct AbsorptionReport {
  double p = 0;
  std::vector<std::pair<Config, double>> absorbers;  ///< absorption probability from 00...0
  double p_mis = 0;
  double p_mis_complement = 0;
  double expected_steps = 0;
  std::size_t reachable_states = 0;
  std::size_t transient_states = 0;
  double residual = 0;  ///< max-norm residual of the linear solves
  std::string method;   ///< "elimination" or "sparse_lu"
};

/// Chains with at most this many transient states use subtraction-free
/// state elimination; larger ones a sparse LU solve with refinement.
inline constexpr std::size_t kEliminationLimit = 1024;

/// Exact absorption analysis of the chain started at 00...0, restricted to
/// reachable states. Requires p in (0, 1).
AbsorptionReport absorption_analysis(const Graph& g, double p, int limit = kDefaultExactLimit);

std::string to_json(const AbsorptionReport& report);

/// Reference closed form for the four-node fixture:
/// (p^3 q + 2 p^2 q^2 + 3 p q^3) / (p^3 q + 2 p^2 q^2 + 4 p q^3).
double closed_form_4node(double p);

/// Reference closed form for the house fixture, with the G1, G2, G3 return series.
/// Neither reference expression matches the update rule exactly; both are kept
/// for comparison.
double closed_form_house(double p);

}  // namespace misca
