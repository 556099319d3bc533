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
#include <string_view>
#include <vector>

#include "misca/fit.hpp"
#include "misca/quantum.hpp"

namespace misca {

enum class CampaignMode {
  ClassicalHeatmap,
  ClassicalPSweep,
  ClassicalScalingN,
  ClassicalScalingK,
  QuantumRelaxation,
  QuantumCycles,
};

std::string_view to_string(CampaignMode m);
CampaignMode campaign_mode_from_string(std::string_view s);

/// Parsed campaign file. Sections and keys:
///   [campaign] name, mode, seed, threads
///   [grid]     N, k, p, theta      (comma lists or start:stop:step)
///   [run]      instances, runs, max_steps, graph (random | chain)
///   [quantum]  target, r_max, t_policy, t, tol, t_max, space
struct CampaignSpec {
  std::string name = "campaign";
  CampaignMode mode = CampaignMode::ClassicalHeatmap;
  std::uint64_t seed = 1;
  int threads = 1;

  std::vector<int> ns;
  std::vector<double> ks;
  std::vector<double> ps;
  std::vector<double> thetas;

  int instances = 10;
  std::int64_t runs = 1000;
  std::int64_t max_steps = 1'000'000;
  std::string graph = "random";

  double target = 0.7;
  int r_max = 1000;
  TPolicy t_policy = TPolicy::Criterion;
  double t = 50.0;
  double tol = 1e-5;
  double t_max = 1e4;
  BasisKind space = BasisKind::Independent;

  /// Normalized text form; its FNV-1a hash identifies the campaign.
  std::string canonical() const;
  std::string hash() const;
};

/// Throws ParseError with the offending line number.
CampaignSpec parse_campaign_spec(std::string_view text);
CampaignSpec read_campaign_spec(const std::string& path);

struct CellResult {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::string key;
  std::string status = "ok";  ///< ok | failed
  std::string error;
  int n = 0;
  double k = kNaN;           ///< grid value; NaN for chains
  double k_realized = kNaN;  ///< mean average degree over instances
  double p = kNaN;
  double theta = kNaN;
  int instances = 0;
  std::int64_t runs = 0;
  std::string observable;    ///< p_mis | steps | T | cycles
  double mean = kNaN;        ///< mean over instances of the per-instance value
  double sigma = kNaN;       ///< standard error of mean
  double variance = kNaN;    ///< sample variance across instances
  double mean_steps = kNaN;  ///< pooled over all runs (classical)
  double var_steps = kNaN;
  std::int64_t unabsorbed = 0;
  int hits = 0;              ///< instances reaching the target (quantum_cycles)
  std::uint64_t seed = 0;
};

struct CampaignOptions {
  std::string out_dir;  ///< empty: nothing is written
  bool resume = false;
  int threads = 0;      ///< 0: use the spec's value
};

struct CampaignResult {
  std::vector<CellResult> cells;
  std::optional<FitResult> fit;
  std::string fit_error;
  std::string spec_hash;
  int resumed = 0;  ///< cells loaded from disk
};

/// Runs every grid cell; failures are recorded per cell. Writes cells.csv,
/// manifest.json, fit.json, parity.csv and cells/<key>.json under out_dir.
/// Outputs depend only on the spec, so reruns are byte-identical.
CampaignResult run_campaign(const CampaignSpec& spec, const CampaignOptions& options = {});

std::string cells_csv(const std::vector<CellResult>& cells);

}  // namespace misca
