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
#include <limits>
#include <sstream>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/quantum.hpp"

namespace misca {

std::string_view to_string(TPolicy p) {
  switch (p) {
    case TPolicy::Criterion: return "criterion";
    case TPolicy::Fixed: return "fixed";
    case TPolicy::Asymptotic: return "asymptotic";
  }
  return "criterion";
}

TPolicy t_policy_from_string(std::string_view s) {
  if (s == "criterion") return TPolicy::Criterion;
  if (s == "fixed") return TPolicy::Fixed;
  if (s == "asymptotic") return TPolicy::Asymptotic;
  throw InvalidArgument("unknown t_policy '" + std::string(s) + "'");
}

namespace {

constexpr double kDiagonalThreshold = 1e-12;

void validate(const ProtocolParams& p) {
  if (!(p.t > 0.0) || !std::isfinite(p.t)) throw InvalidArgument("t must be positive");
  if (!(p.theta >= 0.0) || !std::isfinite(p.theta)) throw InvalidArgument("theta must be nonnegative");
  if (!(p.target > 0.0 && p.target < 1.0)) throw InvalidArgument("target must lie in (0, 1)");
  if (p.r_max < 0) throw InvalidArgument("r_max must be nonnegative");
  if (!(p.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(p.t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  if (p.plateau_tol < 0.0) throw InvalidArgument("plateau_tol must be nonnegative");
  if (p.top_k < 0) throw InvalidArgument("top_k must be nonnegative");
}

struct Stage {
  double elapsed;
  bool converged;
};

Stage dissipative_stage(DensityMatrix& rho, const JumpOperatorSet& ops, const ProtocolParams& p) {
  const bool diagonal = rho.off_diagonal_mass() < kDiagonalThreshold;
  if (p.t_policy == TPolicy::Asymptotic) {
    if (diagonal)
      rho = DensityMatrix::diagonal(rho.basis(), dissipative_limit_diagonal(rho.populations(), ops));
    else
      rho = dissipative_limit(rho, ops);
    return {std::numeric_limits<double>::infinity(), true};
  }
  DissipativeOptions o;
  o.tol = p.tol;
  o.t_max = p.t_max;
  if (p.t_policy == TPolicy::Fixed) o.fixed_duration = p.t;
  if (diagonal) {
    auto r = dissipative_evolve_diagonal(rho.populations(), ops, o);
    rho = DensityMatrix::diagonal(rho.basis(), r.populations);
    return {r.elapsed, r.converged};
  }
  auto r = dissipative_evolve(rho, ops, o);
  rho = std::move(r.rho);
  return {r.elapsed, r.converged};
}

CycleRecord record(int r, const DensityMatrix& rho, const std::vector<IndependenceClass>& cls, Stage st, int top_k) {
  CycleRecord rec;
  rec.r = r;
  rec.elapsed = st.elapsed;
  rec.converged = st.converged;
  const auto pop = rho.populations();
  for (std::size_t k = 0; k < pop.size(); ++k) {
    switch (cls[k]) {
      case IndependenceClass::Maximum:
        rec.p_mis += pop[k];
        rec.p_maximal_total += pop[k];
        break;
      case IndependenceClass::MaximalNonMaximum: rec.p_maximal_total += pop[k]; break;
      case IndependenceClass::NotIndependent: rec.p_not_independent += pop[k]; break;
      case IndependenceClass::IndependentNonMaximal: break;
    }
  }
  std::vector<std::size_t> idx(pop.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(top_k), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) { return pop[a] != pop[b] ? pop[a] > pop[b] : a < b; });
  const int n = rho.basis().num_qubits();
  for (std::size_t k = 0; k < keep; ++k)
    rec.top_populations.emplace_back(Config::from_index(rho.basis().state(idx[k]), n), pop[idx[k]]);
  return rec;
}

}  // namespace

CycleTrace run_protocol(const Graph& g, const ProtocolParams& params, DensityMatrix* final_state) {
  validate(params);
  const Basis basis = Basis::make(g, params.space);
  const JumpOperatorSet ops = build_jump_operators(g, basis);
  const PxpHamiltonian h = build_pxp(g, basis);

  CycleTrace trace;
  trace.mis_size = mis_size(g);
  std::vector<IndependenceClass> cls(basis.dim());
  for (std::size_t k = 0; k < cls.size(); ++k) cls[k] = classify(g, basis.state(k), trace.mis_size);

  DensityMatrix rho = DensityMatrix::projector(basis, 0);
  trace.cycles.push_back(record(0, rho, cls, dissipative_stage(rho, ops, params), params.top_k));
  auto hit = [&](const CycleRecord& rec) {
    if (!trace.r_hit && rec.p_mis > params.target) trace.r_hit = rec.r;
    return trace.r_hit && params.stop_at_target;
  };
  if (!hit(trace.cycles.back()) && params.r_max > 0) {
    std::optional<UnitaryPropagator> u;
    if (params.theta > 0.0) u.emplace(h, params.theta);
    for (int r = 1; r <= params.r_max; ++r) {
      if (u) u->apply(rho);
      trace.cycles.push_back(record(r, rho, cls, dissipative_stage(rho, ops, params), params.top_k));
      if (hit(trace.cycles.back())) break;
      if (params.plateau_tol > 0.0) {
        const double delta = trace.cycles[trace.cycles.size() - 1].p_mis - trace.cycles[trace.cycles.size() - 2].p_mis;
        if (std::abs(delta) < params.plateau_tol) {
          trace.r_plateau = r;
          break;
        }
      }
    }
  }
  if (final_state) *final_state = std::move(rho);
  return trace;
}

std::string to_jsonl(const CycleTrace& trace, const std::string& graph_id, const Graph& g,
                     const ProtocolParams& params) {
  std::ostringstream os;
  for (const auto& c : trace.cycles) {
    nlohmann::ordered_json j;
    j["graph_id"] = graph_id;
    j["n"] = g.num_vertices();
    j["k"] = g.average_degree();
    j["theta"] = params.theta;
    j["t_policy"] = std::string(to_string(params.t_policy));
    j["r"] = c.r;
    j["p_mis"] = c.p_mis;
    j["p_maximal_total"] = c.p_maximal_total;
    j["p_not_independent"] = c.p_not_independent;
    j["elapsed"] = std::isfinite(c.elapsed) ? nlohmann::ordered_json(c.elapsed) : nlohmann::ordered_json();
    j["converged"] = c.converged;
    nlohmann::ordered_json top = nlohmann::ordered_json::object();
    for (const auto& [cfg, w] : c.top_populations) top[cfg.to_string()] = w;
    j["top_populations"] = std::move(top);
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace misca
