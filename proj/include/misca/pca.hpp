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
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "misca/graph.hpp"

namespace misca {

struct PcaParams {
  double p = 0.5;  ///< activation probability of a free vertex
  std::uint64_t seed = 0;
  std::int64_t max_steps = 1'000'000;
};

/// Identifies one synchronous update in the counter-based random stream.
struct StepKey {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  std::uint64_t step = 0;
};

struct RunResult {
  Config final;
  std::int64_t steps = 0;
  bool absorbed = false;
  /// Set when the run was absorbed and the maximum cardinality is known.
  std::optional<IndependenceClass> cls;
};

struct EnsembleStats {
  std::int64_t runs = 0;
  std::int64_t absorbed = 0;
  std::int64_t unabsorbed = 0;
  std::int64_t maximum = 0;  ///< absorbed runs ending in a maximum set
  /// Fraction of absorbed runs ending in a maximum set; NaN when nothing was
  /// absorbed or the maximum cardinality is unknown.
  double p_mis_hat = std::numeric_limits<double>::quiet_NaN();
  double mean_steps = std::numeric_limits<double>::quiet_NaN();
  double var_steps = std::numeric_limits<double>::quiet_NaN();

  /// Binomial standard error of p_mis_hat.
  double p_mis_sigma() const;
};

struct EnsembleOptions {
  std::int64_t max_steps = 1'000'000;
  int threads = 1;
  /// Maximum cardinality if already known; computed when absent and the graph
  /// is within the enumeration limit.
  std::optional<int> mis_size;
};

/// One synchronous update. Every vertex reads the old configuration: an
/// active neighbour forces 0, an active vertex with a quiet neighbourhood
/// stays 1, a free vertex activates with probability p.
Config pca_step(const Graph& g, const Config& c, double p, const StepKey& key);

/// Iterates from 00...0 (or `start`) until a maximal independent set is hit
/// or max_steps updates were applied. `run_index` selects the random stream
/// next to params.seed.
RunResult run_to_absorption(const Graph& g, const PcaParams& params, std::optional<int> mis = std::nullopt,
                            const Config* start = nullptr, std::uint64_t run_index = 0);

/// Runs `runs` independent chains with seeds base_seed .. base_seed+runs-1.
EnsembleStats estimate_ensemble(const Graph& g, double p, std::int64_t runs, std::uint64_t base_seed,
                                const EnsembleOptions& options = {});

struct SweepPoint {
  double p = 0;
  std::uint64_t seed = 0;
  EnsembleStats stats;
};

/// One ensemble per grid value, each on its own derived seed stream.
std::vector<SweepPoint> sweep_p(const Graph& g, const std::vector<double>& p_grid, std::int64_t runs,
                                std::uint64_t base_seed, const EnsembleOptions& options = {});

/// JSON-lines record (no trailing newline).
std::string ensemble_record(const std::string& graph_id, double p, const EnsembleStats& stats,
                            std::uint64_t seed);

}  // namespace misca
