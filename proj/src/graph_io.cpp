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
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/graph.hpp"

namespace misca {

namespace {

std::string strip_comment(std::string line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  return line;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); });
}

Graph parse_json_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON graph: ") + e.what(), 0);
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
    throw ParseError("JSON graph needs keys \"n\" and \"edges\"", 0);
  }
  const int n = doc.at("n").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : doc.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("each edge must be a pair [i, j]", 0);
    edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
  }
  return Graph(n, std::move(edges));
}

Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int n = -1;
  long declared = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_comment(line);
    if (blank(line)) continue;
    std::istringstream fields(line);
    long a = 0;
    long b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError("expected two integers, got '" + line + "'", line_no);
    }
    if (n < 0) {
      if (a < 1 || b < 0) throw ParseError("header must be 'N M' with N >= 1, M >= 0", line_no);
      n = static_cast<int>(a);
      declared = b;
      continue;
    }
    if (a < 1 || b < 1 || a > n || b > n) {
      throw ParseError("vertex out of range 1.." + std::to_string(n), line_no);
    }
    edges.emplace_back(static_cast<int>(a) - 1, static_cast<int>(b) - 1);
  }
  if (n < 0) throw ParseError("empty graph file", 0);
  if (static_cast<long>(edges.size()) != declared) {
    throw ParseError("header declares " + std::to_string(declared) + " edges, found " +
                         std::to_string(edges.size()),
                     0);
  }
  return Graph(n, std::move(edges));
}

std::vector<std::pair<int, int>> one_based(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<std::pair<int, int>> out;
  for (auto [a, b] : pairs) out.emplace_back(a - 1, b - 1);
  return out;
}

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
  std::vector<int> da;
  std::vector<int> db;
  for (int i = 0; i < a.num_vertices(); ++i) {
    da.push_back(a.degree(i));
    db.push_back(b.degree(i));
  }
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;
  std::vector<int> perm(static_cast<std::size_t>(a.num_vertices()));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (const auto& [u, v] : a.edges()) {
      if (!b.has_edge(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

bool is_path(const Graph& g) {
  if (g.num_edges() != g.num_vertices() - 1) return false;
  int ends = 0;
  for (int i = 0; i < g.num_vertices(); ++i) {
    if (g.degree(i) > 2) return false;
    if (g.degree(i) <= 1) ++ends;
  }
  if (g.num_vertices() == 1) return true;
  // n-1 edges, max degree 2 and exactly two endpoints: connected path
  return ends == 2;
}

}  // namespace

Graph parse_graph(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json_graph(text);
  return parse_edge_list(text);
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [a, b] : g.edges()) out << a + 1 << ' ' << b + 1 << '\n';
  return out.str();
}

std::string to_json(const Graph& g) {
  nlohmann::json doc;
  doc["n"] = g.num_vertices();
  doc["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.edges()) doc["edges"].push_back({a + 1, b + 1});
  return doc.dump();
}

Graph fixture(std::string_view name) {
  if (name == "four-node") {
    // Pendant vertex 1 on the triangle 2-3-4.
    return Graph(4, one_based({{1, 2}, {2, 3}, {2, 4}, {3, 4}}));
  }
  if (name == "house") {
    // Pentagon 1-2-3-4-5 with a K4 on {4,5,6,7}: the only 7-vertex graph with
    // eight maximal sets, two of them maximum, and P_MIS -> 2/3 as p -> 1.
    return Graph(7, one_based({{1, 2}, {1, 5}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {4, 7}, {5, 6}, {5, 7}, {6, 7}}));
  }
  if (name.starts_with("chain-")) {
    int n = 0;
    try {
      n = std::stoi(std::string(name.substr(6)));
    } catch (const std::exception&) {
      throw InvalidArgument("bad chain fixture name '" + std::string(name) + "'");
    }
    return gen_open_chain(n);
  }
  throw InvalidArgument("unknown fixture '" + std::string(name) + "'");
}

std::optional<std::string> match_fixture(const Graph& g) {
  if (is_path(g)) return "chain-" + std::to_string(g.num_vertices());
  if (g.num_vertices() > 8) return std::nullopt;
  for (const char* name : {"four-node", "house"}) {
    if (isomorphic(g, fixture(name))) return std::string(name);
  }
  return std::nullopt;
}

}  // namespace misca
