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

#include "misca/pca.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/rng.hpp"

namespace misca {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("activation probability must lie in [0, 1]");
}

void step_into(const Graph& g, const Config& in, Config& out, double p, const StepKey& key) {
  for (int i = 0; i < g.num_vertices(); ++i) {
    bool neighbour_active = false;
    for (int j : g.neighbors(i)) {
      if (in[j]) {
        neighbour_active = true;
        break;
      }
    }
    if (neighbour_active) {
      out.set(i, false);
    } else if (in[i]) {
      out.set(i, true);
    } else {
      out.set(i, counter_uniform(key.seed, key.run, key.step, static_cast<std::uint64_t>(i)) < p);
    }
  }
}

// Integer moments keep the reduction exact, so any split of the runs over
// threads gives bit-identical statistics.
struct Accumulator {
  std::int64_t runs = 0;
  std::int64_t absorbed = 0;
  std::int64_t maximum = 0;
  std::int64_t classified = 0;
  __int128 sum_steps = 0;
  __int128 sum_sq_steps = 0;

  void add(const RunResult& r) {
    ++runs;
    if (!r.absorbed) return;
    ++absorbed;
    sum_steps += r.steps;
    sum_sq_steps += static_cast<__int128>(r.steps) * r.steps;
    if (r.cls) {
      ++classified;
      if (*r.cls == IndependenceClass::Maximum) ++maximum;
    }
  }

  void merge(const Accumulator& o) {
    runs += o.runs;
    absorbed += o.absorbed;
    maximum += o.maximum;
    classified += o.classified;
    sum_steps += o.sum_steps;
    sum_sq_steps += o.sum_sq_steps;
  }

  EnsembleStats finish() const {
    EnsembleStats s;
    s.runs = runs;
    s.absorbed = absorbed;
    s.unabsorbed = runs - absorbed;
    s.maximum = maximum;
    if (absorbed > 0 && classified == absorbed) {
      s.p_mis_hat = static_cast<double>(maximum) / static_cast<double>(absorbed);
    }
    if (absorbed > 0) {
      const long double n = absorbed;
      const long double mean = static_cast<long double>(sum_steps) / n;
      s.mean_steps = static_cast<double>(mean);
      if (absorbed > 1) {
        const long double ss = static_cast<long double>(sum_sq_steps) - n * mean * mean;
        s.var_steps = static_cast<double>(std::max<long double>(ss, 0.0L) / (n - 1));
      } else {
        s.var_steps = 0.0;
      }
    }
    return s;
  }
};

}  // namespace

double EnsembleStats::p_mis_sigma() const {
  if (absorbed == 0 || std::isnan(p_mis_hat)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(p_mis_hat * (1.0 - p_mis_hat) / static_cast<double>(absorbed));
}

Config pca_step(const Graph& g, const Config& c, double p, const StepKey& key) {
  if (c.size() != g.num_vertices()) throw InvalidArgument("configuration length does not match graph");
  check_probability(p);
  Config out(g.num_vertices());
  step_into(g, c, out, p, key);
  return out;
}

RunResult run_to_absorption(const Graph& g, const PcaParams& params, std::optional<int> mis, const Config* start,
                            std::uint64_t run_index) {
  check_probability(params.p);
  if (!mis && g.num_vertices() <= kDefaultEnumerationLimit) mis = mis_size(g);
  Config cur = start ? *start : Config(g.num_vertices());
  if (cur.size() != g.num_vertices()) throw InvalidArgument("start configuration length does not match graph");
  Config next(g.num_vertices());

  RunResult result;
  std::int64_t steps = 0;
  bool absorbed = is_maximal_independent(g, cur);
  while (!absorbed && steps < params.max_steps) {
    step_into(g, cur, next, params.p, StepKey{params.seed, run_index, static_cast<std::uint64_t>(steps)});
    std::swap(cur, next);
    ++steps;
    absorbed = is_maximal_independent(g, cur);
  }
  result.steps = steps;
  result.absorbed = absorbed;
  if (absorbed && mis) result.cls = classify(g, cur, *mis);
  result.final = std::move(cur);
  return result;
}

EnsembleStats estimate_ensemble(const Graph& g, double p, std::int64_t runs, std::uint64_t base_seed,
                                const EnsembleOptions& options) {
  check_probability(p);
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  std::optional<int> mis = options.mis_size;
  if (!mis && g.num_vertices() <= kDefaultEnumerationLimit) mis = mis_size(g);

  const int threads = static_cast<int>(std::clamp<std::int64_t>(options.threads, 1, runs));
  std::vector<Accumulator> partial(static_cast<std::size_t>(threads));
  auto work = [&](int t) {
    const std::int64_t begin = runs * t / threads;
    const std::int64_t end = runs * (t + 1) / threads;
    PcaParams params{p, 0, options.max_steps};
    for (std::int64_t i = begin; i < end; ++i) {
      params.seed = base_seed + static_cast<std::uint64_t>(i);
      partial[static_cast<std::size_t>(t)].add(run_to_absorption(g, params, mis));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  Accumulator total;
  for (const auto& a : partial) total.merge(a);
  return total.finish();
}

std::vector<SweepPoint> sweep_p(const Graph& g, const std::vector<double>& p_grid, std::int64_t runs,
                                std::uint64_t base_seed, const EnsembleOptions& options) {
  for (double p : p_grid) check_probability(p);
  EnsembleOptions opts = options;
  if (!opts.mis_size && g.num_vertices() <= kDefaultEnumerationLimit) opts.mis_size = mis_size(g);
  std::vector<SweepPoint> out;
  out.reserve(p_grid.size());
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    SweepPoint point;
    point.p = p_grid[i];
    point.seed = derive_seed(base_seed, i);
    point.stats = estimate_ensemble(g, point.p, runs, point.seed, opts);
    out.push_back(point);
  }
  return out;
}

namespace {
nlohmann::ordered_json number_or_null(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); }
}  // namespace

std::string ensemble_record(const std::string& graph_id, double p, const EnsembleStats& stats, std::uint64_t seed) {
  nlohmann::ordered_json rec;
  rec["graph_id"] = graph_id;
  rec["p"] = p;
  rec["runs"] = stats.runs;
  rec["p_mis_hat"] = number_or_null(stats.p_mis_hat);
  rec["mean_steps"] = number_or_null(stats.mean_steps);
  rec["var_steps"] = number_or_null(stats.var_steps);
  rec["unabsorbed"] = stats.unabsorbed;
  rec["seed"] = seed;
  return rec.dump();
}

}  // namespace misca
