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

#include "misca/misca.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include <json.hpp>

#include "misca/campaign.hpp"
#include "misca/error.hpp"
#include "misca/graph.hpp"
#include "misca/markov.hpp"
#include "misca/pca.hpp"
#include "misca/quantum.hpp"

struct misca_graph {
  misca::Graph graph;
};

namespace {

thread_local std::string last_error;

using ojson = nlohmann::ordered_json;

misca_status fail(misca_status code, const char* what) {
  last_error = what;
  return code;
}

// Maps library exceptions onto status codes.
template <class F>
misca_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MISCA_OK;
  } catch (const misca::ParseError& e) {
    return fail(MISCA_ERR_PARSE, e.what());
  } catch (const misca::LimitExceeded& e) {
    return fail(MISCA_ERR_LIMIT, e.what());
  } catch (const misca::InvalidArgument& e) {
    return fail(MISCA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const misca::IoError& e) {
    return fail(MISCA_ERR_IO, e.what());
  } catch (const misca::NumericalError& e) {
    return fail(MISCA_ERR_NUMERICAL, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MISCA_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(MISCA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MISCA_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw misca::InvalidArgument(std::string(what) + " must not be NULL");
}

template <class F>
misca_status make_graph(misca_graph** out, F&& build) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    *out = new misca_graph{build()};
  });
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(); }

}  // namespace

extern "C" {

const char* misca_version(void) { return MISCA_VERSION_STRING; }
const char* misca_last_error(void) { return last_error.c_str(); }
void misca_string_free(char* s) { std::free(s); }

misca_status misca_graph_load(const char* path, misca_graph** out) {
  return make_graph(out, [&] {
    require(path, "path");
    return misca::read_graph(path);
  });
}

misca_status misca_graph_parse(const char* text, misca_graph** out) {
  return make_graph(out, [&] {
    require(text, "text");
    return misca::parse_graph(text);
  });
}

misca_status misca_graph_fixture(const char* name, misca_graph** out) {
  return make_graph(out, [&] {
    require(name, "name");
    return misca::fixture(name);
  });
}

misca_status misca_graph_chain(int n, misca_graph** out) {
  return make_graph(out, [&] { return misca::gen_open_chain(n); });
}

misca_status misca_graph_random(int n, double k, uint64_t seed, misca_graph** out) {
  return make_graph(out, [&] { return misca::gen_random_graph(n, k, seed); });
}

misca_status misca_graph_unit_disk(int n, double radius, double box, uint64_t seed, misca_graph** out) {
  return make_graph(out, [&] { return misca::gen_unit_disk(n, radius, box, seed); });
}

void misca_graph_free(misca_graph* g) { delete g; }

int misca_graph_num_vertices(const misca_graph* g) { return g ? g->graph.num_vertices() : -1; }
int misca_graph_num_edges(const misca_graph* g) { return g ? g->graph.num_edges() : -1; }
double misca_graph_average_degree(const misca_graph* g) { return g ? g->graph.average_degree() : NAN; }

misca_status misca_graph_edge_list(const misca_graph* g, char** out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = dup(misca::to_edge_list(g->graph));
  });
}

misca_status misca_graph_fixture_name(const misca_graph* g, char** out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = dup(misca::match_fixture(g->graph).value_or(""));
  });
}

misca_status misca_pca_ensemble(const misca_graph* g, double p, int64_t runs, uint64_t seed, int64_t max_steps,
                                int threads, char** out_json) {
  return guarded([&] {
    require(g, "graph");
    require(out_json, "out_json");
    misca::EnsembleOptions o;
    o.max_steps = max_steps;
    o.threads = threads;
    const auto st = misca::estimate_ensemble(g->graph, p, runs, seed, o);
    ojson j;
    j["p"] = p;
    j["runs"] = st.runs;
    j["absorbed"] = st.absorbed;
    j["unabsorbed"] = st.unabsorbed;
    j["maximum"] = st.maximum;
    j["p_mis_hat"] = num(st.p_mis_hat);
    j["p_mis_sigma"] = num(st.p_mis_sigma());
    j["mean_steps"] = num(st.mean_steps);
    j["var_steps"] = num(st.var_steps);
    j["seed"] = seed;
    *out_json = dup(j.dump());
  });
}

misca_status misca_exact(const misca_graph* g, double p, char** out_json) {
  return guarded([&] {
    require(g, "graph");
    require(out_json, "out_json");
    const auto rep = misca::absorption_analysis(g->graph, p);
    auto j = ojson::parse(misca::to_json(rep));
    if (auto name = misca::match_fixture(g->graph)) {
      j["fixture"] = *name;
      if (*name == "four-node" || *name == "house") {
        const double cf = *name == "four-node" ? misca::closed_form_4node(p) : misca::closed_form_house(p);
        j["closed_form"] = cf;
        j["closed_form_diff"] = rep.p_mis - cf;
      }
    }
    *out_json = dup(j.dump());
  });
}

void misca_qca_params_default(misca_qca_params* params) {
  if (!params) return;
  const misca::ProtocolParams d;
  params->theta = d.theta;
  params->target = d.target;
  params->r_max = d.r_max;
  params->t_policy = MISCA_T_CRITERION;
  params->t = d.t;
  params->tol = d.tol;
  params->t_max = d.t_max;
  params->space = MISCA_SPACE_INDEPENDENT;
  params->stop_at_target = d.stop_at_target ? 1 : 0;
  params->plateau_tol = d.plateau_tol;
  params->top_k = d.top_k;
  params->graph_id = nullptr;
  params->checkpoint_path = nullptr;
}

misca_status misca_qca(const misca_graph* g, const misca_qca_params* params, char** out_jsonl, char** out_summary) {
  return guarded([&] {
    require(g, "graph");
    require(params, "params");
    misca::ProtocolParams pp;
    pp.theta = params->theta;
    pp.target = params->target;
    pp.r_max = params->r_max;
    switch (params->t_policy) {
      case MISCA_T_CRITERION: pp.t_policy = misca::TPolicy::Criterion; break;
      case MISCA_T_FIXED: pp.t_policy = misca::TPolicy::Fixed; break;
      case MISCA_T_ASYMPTOTIC: pp.t_policy = misca::TPolicy::Asymptotic; break;
      default: throw misca::InvalidArgument("unknown t_policy");
    }
    pp.t = params->t;
    pp.tol = params->tol;
    pp.t_max = params->t_max;
    switch (params->space) {
      case MISCA_SPACE_INDEPENDENT: pp.space = misca::BasisKind::Independent; break;
      case MISCA_SPACE_FULL: pp.space = misca::BasisKind::Full; break;
      default: throw misca::InvalidArgument("unknown space");
    }
    pp.stop_at_target = params->stop_at_target != 0;
    pp.plateau_tol = params->plateau_tol;
    pp.top_k = params->top_k;

    std::unique_ptr<misca::DensityMatrix> final_state;
    if (params->checkpoint_path)
      final_state = std::make_unique<misca::DensityMatrix>(misca::Basis::from_states(misca::BasisKind::Independent, 0, {0}));
    const auto trace = misca::run_protocol(g->graph, pp, final_state.get());
    if (final_state) misca::write_checkpoint(params->checkpoint_path, *final_state);

    const std::string id = params->graph_id ? params->graph_id : "graph";
    if (out_jsonl) *out_jsonl = dup(misca::to_jsonl(trace, id, g->graph, pp));
    if (out_summary) {
      ojson s;
      s["graph_id"] = id;
      s["r_hit"] = trace.r_hit ? ojson(*trace.r_hit) : ojson();
      s["r_plateau"] = trace.r_plateau ? ojson(*trace.r_plateau) : ojson();
      s["final_p_mis"] = trace.cycles.back().p_mis;
      s["cycles"] = trace.cycles.back().r;
      s["mis_size"] = trace.mis_size;
      *out_summary = dup(s.dump());
    }
  });
}

misca_status misca_campaign_run(const char* spec_path, const char* out_dir, int resume, int threads,
                                char** out_summary) {
  return guarded([&] {
    require(spec_path, "spec_path");
    require(out_dir, "out_dir");
    const auto spec = misca::read_campaign_spec(spec_path);
    misca::CampaignOptions o;
    o.out_dir = out_dir;
    o.resume = resume != 0;
    o.threads = threads;
    const auto res = misca::run_campaign(spec, o);
    if (out_summary) {
      ojson s;
      s["name"] = spec.name;
      s["mode"] = std::string(misca::to_string(spec.mode));
      s["spec_hash"] = res.spec_hash;
      int ok = 0;
      for (const auto& c : res.cells) ok += c.status == "ok";
      s["cells"] = res.cells.size();
      s["ok"] = ok;
      s["failed"] = static_cast<int>(res.cells.size()) - ok;
      s["resumed"] = res.resumed;
      if (res.fit) s["fit"] = ojson::parse(misca::to_json(*res.fit));
      if (!res.fit_error.empty()) s["fit_error"] = res.fit_error;
      *out_summary = dup(s.dump());
    }
  });
}

}  // extern "C"
