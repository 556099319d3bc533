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

#include "misca/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <type_traits>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/format.hpp"
#include "misca/pca.hpp"
#include "misca/rng.hpp"

namespace misca {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(CampaignMode m) {
  switch (m) {
    case CampaignMode::ClassicalHeatmap: return "classical_heatmap";
    case CampaignMode::ClassicalPSweep: return "classical_p_sweep";
    case CampaignMode::ClassicalScalingN: return "classical_scaling_N";
    case CampaignMode::ClassicalScalingK: return "classical_scaling_k";
    case CampaignMode::QuantumRelaxation: return "quantum_relaxation";
    case CampaignMode::QuantumCycles: return "quantum_cycles";
  }
  return "classical_heatmap";
}

CampaignMode campaign_mode_from_string(std::string_view s) {
  for (auto m : {CampaignMode::ClassicalHeatmap, CampaignMode::ClassicalPSweep, CampaignMode::ClassicalScalingN,
                 CampaignMode::ClassicalScalingK, CampaignMode::QuantumRelaxation, CampaignMode::QuantumCycles})
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown campaign mode '" + std::string(s) + "'");
}

namespace {

bool is_classical(CampaignMode m) {
  return m == CampaignMode::ClassicalHeatmap || m == CampaignMode::ClassicalPSweep ||
         m == CampaignMode::ClassicalScalingN || m == CampaignMode::ClassicalScalingK;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, int line, std::string_view key) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("invalid number '" + std::string(s) + "' for " + std::string(key), line);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ParseError("non-finite value for " + std::string(key), line);
  }
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view s, int line, std::string_view key) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    std::string_view item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    const std::size_t c1 = item.find(':');
    if (c1 != std::string_view::npos) {
      const std::size_t c2 = item.find(':', c1 + 1);
      if (c2 == std::string_view::npos) throw ParseError("range must be start:stop:step in " + std::string(key), line);
      const T a = parse_number<T>(item.substr(0, c1), line, key);
      const T b = parse_number<T>(item.substr(c1 + 1, c2 - c1 - 1), line, key);
      const T step = parse_number<T>(item.substr(c2 + 1), line, key);
      if (!(step > 0) || b < a) throw ParseError("empty or non-increasing range in " + std::string(key), line);
      const long count = static_cast<long>(std::floor(static_cast<double>(b - a) / static_cast<double>(step) + 1e-9)) + 1;
      if (count > 100000) throw ParseError("range too long in " + std::string(key), line);
      for (long i = 0; i < count; ++i) {
        T v = static_cast<T>(a + static_cast<T>(i) * step);
        // Grid points are decimal literals; drop the accumulated ulp.
        if constexpr (std::is_floating_point_v<T>) v = std::round(v * 1e12) / 1e12;
        out.push_back(v);
      }
    } else {
      out.push_back(parse_number<T>(item, line, key));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::string CampaignSpec::canonical() const {
  std::ostringstream os;
  os << "name=" << name << '\n'
     << "mode=" << to_string(mode) << '\n'
     << "seed=" << seed << '\n'
     << "N=" << join(ns) << '\n'
     << "k=" << join(ks) << '\n'
     << "p=" << join(ps) << '\n'
     << "theta=" << join(thetas) << '\n'
     << "instances=" << instances << '\n'
     << "runs=" << runs << '\n'
     << "max_steps=" << max_steps << '\n'
     << "graph=" << graph << '\n'
     << "target=" << format_double(target) << '\n'
     << "r_max=" << r_max << '\n'
     << "t_policy=" << to_string(t_policy) << '\n'
     << "t=" << format_double(t) << '\n'
     << "tol=" << format_double(tol) << '\n'
     << "t_max=" << format_double(t_max) << '\n'
     << "space=" << to_string(space) << '\n';
  return os.str();
}

std::string CampaignSpec::hash() const {
  const std::string c = canonical();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(c.data(), c.size())));
  return buf;
}

CampaignSpec parse_campaign_spec(std::string_view text) {
  CampaignSpec spec;
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  int line_no = 0;
  int last_line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::size_t hash = raw.find_first_of("#;");
    std::string_view line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    last_line = line_no;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "campaign" && section != "grid" && section != "run" && section != "quantum")
        throw ParseError("unknown section [" + section + "]", line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    if (section.empty()) throw ParseError("key outside of any section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view val = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    if (seen.count(full)) throw ParseError("duplicate key " + key, line_no);
    seen[full] = line_no;
    try {
      if (full == "campaign.name") {
        if (val.empty()) throw ParseError("empty name", line_no);
        spec.name = std::string(val);
      } else if (full == "campaign.mode") {
        spec.mode = campaign_mode_from_string(val);
      } else if (full == "campaign.seed") {
        spec.seed = parse_number<std::uint64_t>(val, line_no, key);
      } else if (full == "campaign.threads") {
        spec.threads = parse_number<int>(val, line_no, key);
        if (spec.threads < 1) throw ParseError("threads must be >= 1", line_no);
      } else if (full == "grid.N") {
        spec.ns = parse_list<int>(val, line_no, key);
      } else if (full == "grid.k") {
        spec.ks = parse_list<double>(val, line_no, key);
      } else if (full == "grid.p") {
        spec.ps = parse_list<double>(val, line_no, key);
      } else if (full == "grid.theta") {
        spec.thetas = parse_list<double>(val, line_no, key);
      } else if (full == "run.instances") {
        spec.instances = parse_number<int>(val, line_no, key);
        if (spec.instances < 1) throw ParseError("instances must be >= 1", line_no);
      } else if (full == "run.runs") {
        spec.runs = parse_number<std::int64_t>(val, line_no, key);
        if (spec.runs < 1) throw ParseError("runs must be >= 1", line_no);
      } else if (full == "run.max_steps") {
        spec.max_steps = parse_number<std::int64_t>(val, line_no, key);
        if (spec.max_steps < 1) throw ParseError("max_steps must be >= 1", line_no);
      } else if (full == "run.graph") {
        if (val != "random" && val != "chain") throw ParseError("graph must be random or chain", line_no);
        spec.graph = std::string(val);
      } else if (full == "quantum.target") {
        spec.target = parse_number<double>(val, line_no, key);
        if (!(spec.target > 0 && spec.target < 1)) throw ParseError("target must lie in (0, 1)", line_no);
      } else if (full == "quantum.r_max") {
        spec.r_max = parse_number<int>(val, line_no, key);
        if (spec.r_max < 0) throw ParseError("r_max must be >= 0", line_no);
      } else if (full == "quantum.t_policy") {
        spec.t_policy = t_policy_from_string(val);
      } else if (full == "quantum.t") {
        spec.t = parse_number<double>(val, line_no, key);
        if (!(spec.t > 0)) throw ParseError("t must be positive", line_no);
      } else if (full == "quantum.tol") {
        spec.tol = parse_number<double>(val, line_no, key);
        if (!(spec.tol > 0)) throw ParseError("tol must be positive", line_no);
      } else if (full == "quantum.t_max") {
        spec.t_max = parse_number<double>(val, line_no, key);
        if (!(spec.t_max > 0)) throw ParseError("t_max must be positive", line_no);
      } else if (full == "quantum.space") {
        spec.space = basis_kind_from_string(val);
      } else {
        throw ParseError("unknown key " + key + " in [" + section + "]", line_no);
      }
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }

  auto require = [&](bool ok, const std::string& what) {
    if (!ok) throw ParseError(what, seen.count("campaign.mode") ? seen["campaign.mode"] : std::max(last_line, 1));
  };
  require(seen.count("campaign.mode") > 0, "missing mode in [campaign]");
  const bool chain = spec.graph == "chain";
  for (int n : spec.ns)
    if (n < 1) throw ParseError("N must be >= 1", seen["grid.N"]);
  for (double k : spec.ks)
    if (!(k >= 0)) throw ParseError("k must be >= 0", seen["grid.k"]);
  for (double p : spec.ps)
    if (!(p >= 0 && p <= 1)) throw ParseError("p must lie in [0, 1]", seen["grid.p"]);
  for (double th : spec.thetas)
    if (!(th >= 0)) throw ParseError("theta must be >= 0", seen["grid.theta"]);
  // An empty N grid is an empty campaign; otherwise every axis must be set.
  if (!spec.ns.empty()) {
    if (!chain) require(!spec.ks.empty(), "random graphs need a k grid");
    if (is_classical(spec.mode)) require(!spec.ps.empty(), "classical modes need a p grid");
    if (spec.mode == CampaignMode::QuantumCycles) require(!spec.thetas.empty(), "quantum_cycles needs a theta grid");
  }
  return spec;
}

CampaignSpec read_campaign_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_campaign_spec(ss.str());
}

namespace {

struct CellDef {
  int n;
  double k;  // NaN for chains
  double p;
  double theta;
  std::string key;
};

std::string make_key(int n, double k, double p, double theta) {
  std::string key = "N=" + std::to_string(n);
  if (!std::isnan(k)) key += "_k=" + format_double(k);
  if (!std::isnan(p)) key += "_p=" + format_double(p);
  if (!std::isnan(theta)) key += "_theta=" + format_double(theta);
  return key;
}

std::vector<CellDef> enumerate_cells(const CampaignSpec& s) {
  constexpr double nan = CellResult::kNaN;
  const bool chain = s.graph == "chain";
  const std::vector<double> ks = chain ? std::vector<double>{nan} : s.ks;
  std::vector<double> ps{nan}, thetas{nan};
  if (is_classical(s.mode)) ps = s.ps;
  if (s.mode == CampaignMode::QuantumCycles) thetas = s.thetas;
  std::vector<CellDef> out;
  for (int n : s.ns)
    for (double k : ks)
      for (double p : ps)
        for (double th : thetas) out.push_back({n, k, p, th, make_key(n, k, p, th)});
  return out;
}

std::uint64_t key_hash(const std::string& s) { return fnv1a64(s.data(), s.size()); }

Graph instance_graph(const CampaignSpec& s, const CellDef& c, int instance) {
  if (s.graph == "chain") return gen_open_chain(c.n);
  const std::uint64_t graph_seed =
      derive_seed(derive_seed(s.seed, key_hash(make_key(c.n, c.k, CellResult::kNaN, CellResult::kNaN))),
                  static_cast<std::uint64_t>(instance));
  return gen_random_graph(c.n, c.k, graph_seed);
}

double sample_variance(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return v.empty() ? CellResult::kNaN : 0.0;
  double acc = 0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return CellResult::kNaN;
  // Shifted by the first sample: identical samples give that sample exactly.
  double acc = 0;
  for (double x : v) acc += x - v.front();
  return v.front() + acc / static_cast<double>(v.size());
}

void run_classical(const CampaignSpec& s, const CellDef& c, CellResult& r) {
  const bool wants_pmis = s.mode == CampaignMode::ClassicalHeatmap || s.mode == CampaignMode::ClassicalPSweep;
  r.observable = wants_pmis ? "p_mis" : "steps";
  std::vector<double> values;
  double se2 = 0, kr = 0;
  double absorbed = 0, sum_steps = 0, sum_sq = 0;
  for (int i = 0; i < s.instances; ++i) {
    const Graph g = instance_graph(s, c, i);
    kr += g.average_degree();
    EnsembleOptions o;
    o.max_steps = s.max_steps;
    o.threads = 1;
    const auto st =
        estimate_ensemble(g, c.p, s.runs, derive_seed(r.seed, static_cast<std::uint64_t>(i)), o);
    r.unabsorbed += st.unabsorbed;
    if (st.absorbed > 0) {
      const double a = static_cast<double>(st.absorbed);
      absorbed += a;
      sum_steps += a * st.mean_steps;
      sum_sq += (a > 1 ? (a - 1) * st.var_steps : 0.0) + a * st.mean_steps * st.mean_steps;
    }
    const double v = wants_pmis ? st.p_mis_hat : st.mean_steps;
    if (std::isnan(v)) continue;
    values.push_back(v);
    if (wants_pmis)
      se2 += st.p_mis_sigma() * st.p_mis_sigma();
    else if (st.absorbed > 0)
      se2 += st.var_steps / static_cast<double>(st.absorbed);
  }
  r.k_realized = kr / s.instances;
  r.mean = mean_of(values);
  r.variance = sample_variance(values, r.mean);
  if (!values.empty()) r.sigma = std::sqrt(se2) / static_cast<double>(values.size());
  if (absorbed > 0) {
    r.mean_steps = sum_steps / absorbed;
    r.var_steps = absorbed > 1 ? (sum_sq - absorbed * r.mean_steps * r.mean_steps) / (absorbed - 1) : 0.0;
  }
  if (values.empty()) throw NumericalError("no instance produced a finite " + r.observable);
}

void run_relaxation(const CampaignSpec& s, const CellDef& c, CellResult& r) {
  r.observable = "T";
  std::vector<double> values;
  double kr = 0;
  for (int i = 0; i < s.instances; ++i) {
    const Graph g = instance_graph(s, c, i);
    kr += g.average_degree();
    const JumpOperatorSet ops = build_jump_operators(g, Basis::make(g, s.space));
    std::vector<double> pop(ops.basis().dim(), 0.0);
    pop[0] = 1.0;
    DissipativeOptions o;
    o.tol = s.tol;
    o.t_max = s.t_max;
    const auto res = dissipative_evolve_diagonal(pop, ops, o);
    if (!res.converged) throw NumericalError("instance " + std::to_string(i) + " did not converge within t_max");
    values.push_back(res.elapsed);
  }
  r.k_realized = kr / s.instances;
  r.mean = mean_of(values);
  r.variance = sample_variance(values, r.mean);
  r.sigma = std::sqrt(r.variance / static_cast<double>(values.size()));
}

void run_cycles(const CampaignSpec& s, const CellDef& c, CellResult& r) {
  r.observable = "cycles";
  std::vector<double> values;
  double kr = 0;
  ProtocolParams pp;
  pp.theta = c.theta;
  pp.target = s.target;
  pp.r_max = s.r_max;
  pp.t_policy = s.t_policy;
  pp.t = s.t;
  pp.tol = s.tol;
  pp.t_max = s.t_max;
  pp.space = s.space;
  pp.stop_at_target = true;
  for (int i = 0; i < s.instances; ++i) {
    const Graph g = instance_graph(s, c, i);
    kr += g.average_degree();
    const auto trace = run_protocol(g, pp);
    if (trace.r_hit) values.push_back(static_cast<double>(*trace.r_hit));
  }
  r.k_realized = kr / s.instances;
  r.hits = static_cast<int>(values.size());
  r.mean = mean_of(values);
  r.variance = sample_variance(values, r.mean);
  if (!values.empty()) r.sigma = std::sqrt(std::isnan(r.variance) ? 0.0 : r.variance / static_cast<double>(values.size()));
}

CellResult run_cell(const CampaignSpec& s, const CellDef& c) {
  CellResult r;
  r.key = c.key;
  r.n = c.n;
  r.k = c.k;
  r.p = c.p;
  r.theta = c.theta;
  r.instances = s.instances;
  r.runs = is_classical(s.mode) ? s.runs : 0;
  r.seed = derive_seed(s.seed, key_hash(c.key));
  try {
    if (is_classical(s.mode))
      run_classical(s, c, r);
    else if (s.mode == CampaignMode::QuantumRelaxation)
      run_relaxation(s, c, r);
    else
      run_cycles(s, c, r);
  } catch (const std::exception& e) {
    r.status = "failed";
    r.error = e.what();
  }
  return r;
}

ojson num(double v) { return std::isnan(v) ? ojson() : ojson(v); }
double denum(const nlohmann::json& j) { return j.is_null() ? CellResult::kNaN : j.get<double>(); }

ojson cell_to_json(const CellResult& r, const std::string& spec_hash) {
  ojson j;
  j["spec_hash"] = spec_hash;
  j["key"] = r.key;
  j["status"] = r.status;
  j["error"] = r.error;
  j["N"] = r.n;
  j["k"] = num(r.k);
  j["k_realized"] = num(r.k_realized);
  j["p"] = num(r.p);
  j["theta"] = num(r.theta);
  j["instances"] = r.instances;
  j["runs"] = r.runs;
  j["observable"] = r.observable;
  j["mean"] = num(r.mean);
  j["sigma"] = num(r.sigma);
  j["variance"] = num(r.variance);
  j["mean_steps"] = num(r.mean_steps);
  j["var_steps"] = num(r.var_steps);
  j["unabsorbed"] = r.unabsorbed;
  j["hits"] = r.hits;
  j["seed"] = r.seed;
  return j;
}

CellResult cell_from_json(const nlohmann::json& j) {
  CellResult r;
  r.key = j.at("key").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.error = j.at("error").get<std::string>();
  r.n = j.at("N").get<int>();
  r.k = denum(j.at("k"));
  r.k_realized = denum(j.at("k_realized"));
  r.p = denum(j.at("p"));
  r.theta = denum(j.at("theta"));
  r.instances = j.at("instances").get<int>();
  r.runs = j.at("runs").get<std::int64_t>();
  r.observable = j.at("observable").get<std::string>();
  r.mean = denum(j.at("mean"));
  r.sigma = denum(j.at("sigma"));
  r.variance = denum(j.at("variance"));
  r.mean_steps = denum(j.at("mean_steps"));
  r.var_steps = denum(j.at("var_steps"));
  r.unabsorbed = j.at("unabsorbed").get<std::int64_t>();
  r.hits = j.at("hits").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

std::optional<CellResult> load_cell(const fs::path& path, const std::string& spec_hash) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(is);
    if (j.at("spec_hash").get<std::string>() != spec_hash) return std::nullopt;
    CellResult r = cell_from_json(j);
    if (r.status != "ok") return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << text;
    if (!os) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<FitResult> fit_cells(CampaignMode mode, const std::vector<CellResult>& cells, std::string& error) {
  std::vector<double> xs, ks, ys;
  for (const auto& c : cells) {
    if (c.status != "ok" || !(c.mean > 0) || !std::isfinite(c.mean)) continue;
    xs.push_back(c.n);
    ks.push_back(mode == CampaignMode::ClassicalScalingK ? c.k : c.k_realized);
    ys.push_back(c.mean);
  }
  try {
    switch (mode) {
      case CampaignMode::ClassicalScalingN: return fit_power(xs, ys);
      case CampaignMode::ClassicalScalingK: return fit_exponential(ks, ys);
      case CampaignMode::QuantumRelaxation: return fit_power_ratio(xs, ks, ys);
      case CampaignMode::QuantumCycles: return fit_cycles(xs, ys);
      default: return std::nullopt;
    }
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

std::string cell_file_name(const std::string& key) {
  std::string f = key;
  for (char& ch : f)
    if (ch == ',' || ch == '/') ch = '_';
  return f + ".json";
}

}  // namespace

std::string cells_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "key,status,N,k,k_realized,p,theta,instances,runs,observable,mean,sigma,variance,mean_steps,var_steps,"
        "unabsorbed,hits,seed,error\n";
  for (const auto& c : cells) {
    std::string err = c.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << c.key << ',' << c.status << ',' << c.n << ',' << format_double(c.k) << ',' << format_double(c.k_realized)
       << ',' << format_double(c.p) << ',' << format_double(c.theta) << ',' << c.instances << ',' << c.runs << ','
       << c.observable << ',' << format_double(c.mean) << ',' << format_double(c.sigma) << ','
       << format_double(c.variance) << ',' << format_double(c.mean_steps) << ',' << format_double(c.var_steps) << ','
       << c.unabsorbed << ',' << c.hits << ',' << c.seed << ",\"" << err << "\"\n";
  }
  return os.str();
}

CampaignResult run_campaign(const CampaignSpec& spec, const CampaignOptions& options) {
  CampaignResult result;
  result.spec_hash = spec.hash();
  const auto defs = enumerate_cells(spec);
  result.cells.resize(defs.size());

  const bool write = !options.out_dir.empty();
  const fs::path out(options.out_dir);
  const fs::path cell_dir = out / "cells";
  if (write) fs::create_directories(cell_dir);

  std::vector<char> done(defs.size(), 0);
  if (write && options.resume) {
    for (std::size_t i = 0; i < defs.size(); ++i) {
      if (auto c = load_cell(cell_dir / cell_file_name(defs[i].key), result.spec_hash)) {
        result.cells[i] = std::move(*c);
        done[i] = 1;
        ++result.resumed;
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < defs.size(); i = next++) {
      if (done[i]) continue;
      result.cells[i] = run_cell(spec, defs[i]);
      if (write)
        write_text(cell_dir / cell_file_name(defs[i].key), cell_to_json(result.cells[i], result.spec_hash).dump(2) + "\n");
    }
  };
  const int threads = std::max(1, options.threads > 0 ? options.threads : spec.threads);
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  result.fit = fit_cells(spec.mode, result.cells, result.fit_error);

  if (write) {
    write_text(out / "cells.csv", cells_csv(result.cells));
    std::vector<std::string> outputs{"cells.csv", "manifest.json"};
    if (result.fit) {
      write_text(out / "fit.json", to_json(*result.fit) + "\n");
      write_text(out / "parity.csv", parity_csv(*result.fit));
      outputs.insert(outputs.end(), {"fit.json", "parity.csv"});
    } else {
      fs::remove(out / "fit.json");
      fs::remove(out / "parity.csv");
    }
    ojson m;
    m["tool"] = "misca";
    m["version"] = MISCA_VERSION_STRING;
    m["name"] = spec.name;
    m["mode"] = std::string(to_string(spec.mode));
    m["spec_hash"] = result.spec_hash;
    m["seed"] = spec.seed;
    m["spec"] = spec.canonical();
    int ok = 0;
    for (const auto& c : result.cells) ok += c.status == "ok";
    m["cells"] = result.cells.size();
    m["ok"] = ok;
    m["failed"] = static_cast<int>(result.cells.size()) - ok;
    ojson seeds = ojson::object();
    for (const auto& c : result.cells) seeds[c.key] = c.seed;
    m["cell_seeds"] = std::move(seeds);
    if (!result.fit_error.empty()) m["fit_error"] = result.fit_error;
    m["outputs"] = outputs;
    write_text(out / "manifest.json", m.dump(2) + "\n");
  }
  return result;
}

}  // namespace misca
