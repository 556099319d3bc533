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

// Command-line front end. Links only the C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "misca/misca.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

using ojson = nlohmann::ordered_json;

struct Failure {
  int code;
  std::string message;
};

int exit_code(misca_status s) {
  switch (s) {
    case MISCA_OK: return kExitOk;
    case MISCA_ERR_INVALID_ARGUMENT:
    case MISCA_ERR_LIMIT:
    case MISCA_ERR_PARSE: return kExitUsage;
    default: return kExitRuntime;
  }
}

void check(misca_status s) {
  if (s != MISCA_OK) throw Failure{exit_code(s), misca_last_error()};
}

struct GraphDeleter {
  void operator()(misca_graph* g) const { misca_graph_free(g); }
};
using GraphPtr = std::unique_ptr<misca_graph, GraphDeleter>;

struct StringDeleter {
  void operator()(char* s) const { misca_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

std::string take(char* s) { return std::string(OwnedString(s).get()); }

struct GraphSource {
  std::string path;
  std::string fixture;

  void add(CLI::App* app) {
    app->add_option("--graph", path, "Graph file (edge list or JSON)");
    app->add_option("--fixture", fixture, "Built-in fixture: four-node, house, chain-<n>");
  }

  GraphPtr load() const {
    misca_graph* g = nullptr;
    if (!path.empty() && !fixture.empty()) throw Failure{kExitUsage, "give either --graph or --fixture, not both"};
    if (!path.empty())
      check(misca_graph_load(path.c_str(), &g));
    else if (!fixture.empty())
      check(misca_graph_fixture(fixture.c_str(), &g));
    else
      throw Failure{kExitUsage, "a graph is required (--graph or --fixture)"};
    return GraphPtr(g);
  }

  std::string id() const {
    if (!fixture.empty()) return fixture;
    return std::filesystem::path(path).stem().string();
  }
};

// Results go to --out or stdout; the manifest goes next to --out or to stderr.
void emit(const std::string& out, const std::string& text, const ojson& manifest) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
    std::cerr << manifest.dump() << '\n';
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw Failure{kExitRuntime, "cannot write " + out};
  os << text;
  std::ofstream ms(out + ".manifest.json", std::ios::binary);
  if (!ms) throw Failure{kExitRuntime, "cannot write " + out + ".manifest.json"};
  ms << manifest.dump(2) << '\n';
}

ojson manifest_base(const std::string& command) {
  ojson m;
  m["tool"] = "misca";
  m["version"] = misca_version();
  m["command"] = command;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum independent set search with probabilistic and quantum cellular automata"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(misca_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a graph (chain, random, disk)");
  std::string gen_kind;
  int gen_n = 0;
  double gen_param = 0.0, gen_box = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("kind", gen_kind, "chain | random | disk")->required()->check(CLI::IsMember({"chain", "random", "disk"}));
  gen->add_option("n", gen_n, "Number of vertices")->required();
  gen->add_option("param", gen_param, "Average degree (random) or radius (disk)");
  gen->add_option("--box", gen_box, "Side of the square for disk graphs");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  // pca
  auto* pca = app.add_subcommand("pca", "Monte-Carlo ensemble of the probabilistic automaton");
  GraphSource pca_graph;
  pca_graph.add(pca);
  std::vector<double> pca_p;
  std::int64_t pca_runs = 1000, pca_max_steps = 1'000'000;
  std::uint64_t pca_seed = 1;
  int pca_threads = 1;
  std::string pca_out;
  pca->add_option("--p", pca_p, "Activation probability (repeatable)")->required();
  pca->add_option("--runs", pca_runs, "Runs per p");
  pca->add_option("--seed", pca_seed, "Base seed");
  pca->add_option("--max-steps", pca_max_steps, "Step budget per run");
  pca->add_option("--threads", pca_threads, "Worker threads");
  pca->add_option("--out", pca_out, "Output JSON-lines file (default stdout)");

  // exact
  auto* exact = app.add_subcommand("exact", "Exact absorption analysis of the automaton chain");
  GraphSource exact_graph;
  exact_graph.add(exact);
  std::vector<double> exact_p;
  std::string exact_out;
  exact->add_option("--p", exact_p, "Activation probability (repeatable)")->required();
  exact->add_option("--out", exact_out, "Output JSON-lines file (default stdout)");

  // qca
  auto* qca = app.add_subcommand("qca", "Alternating dissipative/unitary quantum protocol");
  GraphSource qca_graph;
  qca_graph.add(qca);
  misca_qca_params qp;
  misca_qca_params_default(&qp);
  std::string qca_policy = "criterion", qca_space = "independent", qca_out, qca_checkpoint;
  bool qca_no_stop = false;
  qca->add_option("--theta", qp.theta, "Unitary angle");
  qca->add_option("--target", qp.target, "Target P_MIS");
  qca->add_option("--rmax", qp.r_max, "Cycle budget");
  qca->add_option("--t-policy", qca_policy, "criterion | fixed | asymptotic")
      ->check(CLI::IsMember({"criterion", "fixed", "asymptotic"}));
  qca->add_option("--t", qp.t, "Stage duration for --t-policy fixed");
  qca->add_option("--tol", qp.tol, "Stationarity threshold");
  qca->add_option("--t-max", qp.t_max, "Longest dissipative stage");
  qca->add_option("--space", qca_space, "independent | full")->check(CLI::IsMember({"independent", "full"}));
  qca->add_option("--plateau-tol", qp.plateau_tol, "Stop when |dP| per cycle falls below this (0: off)");
  qca->add_flag("--no-stop", qca_no_stop, "Keep cycling after the target is reached");
  qca->add_option("--checkpoint", qca_checkpoint, "Write the final density matrix here");
  qca->add_option("--out", qca_out, "Output JSON-lines file (default stdout)");

  // campaign
  auto* camp = app.add_subcommand("campaign", "Run a campaign file");
  std::string camp_spec, camp_out;
  bool camp_resume = false;
  int camp_threads = 0;
  camp->add_option("spec", camp_spec, "Campaign file")->required();
  camp->add_option("--out", camp_out, "Output directory")->required();
  camp->add_flag("--resume", camp_resume, "Skip cells already on disk");
  camp->add_option("--threads", camp_threads, "Worker threads (0: from the file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      misca_graph* raw = nullptr;
      if (gen_kind == "chain")
        check(misca_graph_chain(gen_n, &raw));
      else if (gen_kind == "random")
        check(misca_graph_random(gen_n, gen_param, gen_seed, &raw));
      else
        check(misca_graph_unit_disk(gen_n, gen_param, gen_box, gen_seed, &raw));
      GraphPtr g(raw);
      char* text = nullptr;
      check(misca_graph_edge_list(g.get(), &text));
      ojson m = manifest_base("gen");
      m["arguments"] = {{"kind", gen_kind}, {"n", gen_n}, {"param", gen_param}, {"box", gen_box}};
      m["seed"] = gen_seed;
      m["vertices"] = misca_graph_num_vertices(g.get());
      m["edges"] = misca_graph_num_edges(g.get());
      m["average_degree"] = misca_graph_average_degree(g.get());
      emit(gen_out, take(text), m);
      std::fprintf(stderr, "average degree %.6g (%d vertices, %d edges)\n", misca_graph_average_degree(g.get()),
                   misca_graph_num_vertices(g.get()), misca_graph_num_edges(g.get()));
    } else if (pca->parsed()) {
      if (pca_runs < 1) throw Failure{kExitUsage, "--runs must be at least 1"};
      GraphPtr g = pca_graph.load();
      std::string lines;
      for (double p : pca_p) {
        char* js = nullptr;
        check(misca_pca_ensemble(g.get(), p, pca_runs, pca_seed, pca_max_steps, pca_threads, &js));
        ojson rec = ojson::parse(take(js));
        ojson line;
        line["graph_id"] = pca_graph.id();
        for (auto& [k, v] : rec.items()) line[k] = v;
        lines += line.dump() + "\n";
        if (rec["unabsorbed"].get<std::int64_t>() > 0)
          std::fprintf(stderr, "p=%g: %lld runs hit the step budget\n", p,
                       static_cast<long long>(rec["unabsorbed"].get<std::int64_t>()));
      }
      ojson m = manifest_base("pca");
      m["arguments"] = {{"graph", pca_graph.id()}, {"p", pca_p}, {"runs", pca_runs}, {"max_steps", pca_max_steps}};
      m["seed"] = pca_seed;
      emit(pca_out, lines, m);
    } else if (exact->parsed()) {
      GraphPtr g = exact_graph.load();
      std::string lines;
      for (double p : exact_p) {
        char* js = nullptr;
        check(misca_exact(g.get(), p, &js));
        ojson rec = ojson::parse(take(js));
        ojson line;
        line["graph_id"] = exact_graph.id();
        for (auto& [k, v] : rec.items()) line[k] = v;
        lines += line.dump() + "\n";
        std::fprintf(stderr, "p=%g: P_MIS = %.12f\n", p, rec["p_mis"].get<double>());
      }
      ojson m = manifest_base("exact");
      m["arguments"] = {{"graph", exact_graph.id()}, {"p", exact_p}};
      emit(exact_out, lines, m);
    } else if (qca->parsed()) {
      GraphPtr g = qca_graph.load();
      qp.t_policy = qca_policy == "fixed" ? MISCA_T_FIXED : qca_policy == "asymptotic" ? MISCA_T_ASYMPTOTIC : MISCA_T_CRITERION;
      qp.space = qca_space == "full" ? MISCA_SPACE_FULL : MISCA_SPACE_INDEPENDENT;
      qp.stop_at_target = qca_no_stop ? 0 : 1;
      const std::string id = qca_graph.id();
      qp.graph_id = id.c_str();
      qp.checkpoint_path = qca_checkpoint.empty() ? nullptr : qca_checkpoint.c_str();
      char* jsonl = nullptr;
      char* summary = nullptr;
      check(misca_qca(g.get(), &qp, &jsonl, &summary));
      const std::string lines = take(jsonl);
      const ojson s = ojson::parse(take(summary));
      ojson m = manifest_base("qca");
      m["arguments"] = {{"graph", id},        {"theta", qp.theta}, {"target", qp.target}, {"r_max", qp.r_max},
                        {"t_policy", qca_policy}, {"t", qp.t},     {"tol", qp.tol},       {"t_max", qp.t_max},
                        {"space", qca_space}, {"plateau_tol", qp.plateau_tol}, {"stop_at_target", !qca_no_stop}};
      m["summary"] = s;
      emit(qca_out, lines, m);
      std::fprintf(stderr, "r_hit = %s, final P_MIS = %.10f after %d cycles\n",
                   s["r_hit"].is_null() ? "none" : std::to_string(s["r_hit"].get<int>()).c_str(),
                   s["final_p_mis"].get<double>(), s["cycles"].get<int>());
    } else if (camp->parsed()) {
      char* summary = nullptr;
      check(misca_campaign_run(camp_spec.c_str(), camp_out.c_str(), camp_resume ? 1 : 0, camp_threads, &summary));
      const ojson s = ojson::parse(take(summary));
      std::cout << s.dump() << '\n';
      std::fprintf(stderr, "%d cells: %d ok, %d failed, %d resumed\n", s["cells"].get<int>(), s["ok"].get<int>(),
                   s["failed"].get<int>(), s["resumed"].get<int>());
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
