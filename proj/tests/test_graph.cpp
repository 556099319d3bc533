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


#include <doctest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "misca/error.hpp"
#include "misca/graph.hpp"
#include "oracles.hpp"

using namespace misca;

namespace {

Graph random_graph(std::mt19937_64& rng, int n_min, int n_max) {
  std::uniform_int_distribution<int> nd(n_min, n_max);
  const int n = nd(rng);
  std::uniform_real_distribution<double> kd(0.0, n - 1.0);
  return gen_random_graph(n, kd(rng), rng());
}

std::vector<Config> as_configs(const std::vector<std::uint64_t>& states, int n) {
  std::vector<Config> out;
  for (auto s : states) out.push_back(Config::from_index(s, n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("config round trips between strings and indices") {
  const auto c = Config::from_string("1010");
  CHECK(c.size() == 4);
  CHECK(c[0]);
  CHECK_FALSE(c[1]);
  CHECK(c.count() == 2);
  CHECK(c.to_string() == "1010");
  CHECK(c.to_index() == 0b0101);
  CHECK(Config::from_index(c.to_index(), 4) == c);
  CHECK_THROWS_AS(Config::from_string("10x1"), InvalidArgument);
}

TEST_CASE("graph rejects malformed edges") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidArgument);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(Graph(0, {}), InvalidArgument);
}

TEST_CASE("classification of small configurations") {
  const Graph g = gen_open_chain(3);
  CHECK(classify(g, Config::from_string("101")) == IndependenceClass::Maximum);
  CHECK(classify(g, Config::from_string("010")) == IndependenceClass::MaximalNonMaximum);
  CHECK(classify(g, Config::from_string("100")) == IndependenceClass::IndependentNonMaximal);
  CHECK(classify(g, Config::from_string("110")) == IndependenceClass::NotIndependent);
  CHECK(classify(g, Config::from_string("000")) == IndependenceClass::IndependentNonMaximal);
  CHECK_THROWS_AS(classify(g, Config::from_string("10")), InvalidArgument);
}

TEST_CASE("enumeration by scan and by pivoting agree with brute force") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const Graph g = random_graph(rng, 1, 12);
    const auto scan = enumerate_maximal_sets(g, EnumerationMethod::Scan);
    const auto piv = enumerate_maximal_sets(g, EnumerationMethod::Pivoting);
    REQUIRE(scan == piv);
    CHECK(scan == as_configs(oracle::maximal_sets(g.num_vertices(), g.edges()), g.num_vertices()));
    for (const auto& c : scan) {
      CHECK(is_independent(g, c));
      for (int i = 0; i < g.num_vertices(); ++i) {
        if (c[i]) continue;
        bool quiet = true;
        for (int j : g.neighbors(i)) quiet = quiet && !c[j];
        CHECK_FALSE(quiet);
      }
    }
  }
}

TEST_CASE("enumeration respects its size limit") {
  CHECK_THROWS_AS(enumerate_maximal_sets(gen_open_chain(12), EnumerationMethod::Scan, 10), LimitExceeded);
  CHECK_NOTHROW(enumerate_maximal_sets(gen_open_chain(30), EnumerationMethod::Pivoting, 30));
}

TEST_CASE("mis_size matches the largest maximal set") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_graph(rng, 1, 12);
    CHECK(mis_size(g) == oracle::max_cardinality(g.num_vertices(), g.edges()));
  }
  CHECK(mis_size(gen_open_chain(7)) == 4);
  CHECK(mis_size(fixture("house")) == 3);
}

TEST_CASE("penalty energy is minimised exactly on maximum sets when u > 1") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const Graph g = random_graph(rng, 2, 9);
    const int n = g.num_vertices();
    const int best = mis_size(g);
    for (double u : {1.5, 3.0}) {
      double lowest = INFINITY;
      for (StateIndex s = 0; s < (StateIndex{1} << n); ++s)
        lowest = std::min(lowest, mis_energy(g, Config::from_index(s, n), u));
      CHECK(lowest == doctest::Approx(-best));
      for (StateIndex s = 0; s < (StateIndex{1} << n); ++s) {
        const auto c = Config::from_index(s, n);
        const bool argmin = std::abs(mis_energy(g, c, u) - lowest) < 1e-12;
        CHECK(argmin == (classify(g, c) == IndependenceClass::Maximum));
      }
    }
  }
  CHECK_THROWS_AS(mis_energy(gen_open_chain(2), Config::from_string("11"), 0.0), InvalidArgument);
}

TEST_CASE("random graphs realise the rounded edge count") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> nd(1, 40);
    const int n = nd(rng);
    std::uniform_real_distribution<double> kd(0.0, n - 1.0);
    const double k = kd(rng);
    const Graph g = gen_random_graph(n, k, rng());
    const double m = static_cast<double>(std::llround(k * n / 2.0));
    CHECK(g.average_degree() == 2.0 * m / n);
  }
  CHECK(gen_random_graph(10, 2.0, 5) == gen_random_graph(10, 2.0, 5));
  CHECK_THROWS_AS(gen_random_graph(5, 4.5, 1), InvalidArgument);
  CHECK_THROWS_AS(gen_random_graph(5, -1.0, 1), InvalidArgument);
}

TEST_CASE("unit disk graphs connect exactly the close pairs") {
  const Graph g = gen_unit_disk(20, 0.3, 1.0, 3);
  CHECK(g.num_vertices() == 20);
  CHECK(g == gen_unit_disk(20, 0.3, 1.0, 3));
  CHECK(gen_unit_disk(10, 2.0, 1.0, 1).num_edges() == 45);
  CHECK_THROWS_AS(gen_unit_disk(5, -0.1, 1.0, 1), InvalidArgument);
}

TEST_CASE("edge list parsing") {
  const Graph g = parse_graph("# comment\n4 3\n1 2\n2 3  # trailing\n\n3 4\n");
  CHECK(g == gen_open_chain(4));
  CHECK(parse_graph(to_edge_list(g)) == g);
  CHECK(parse_graph(to_json(g)) == g);
  CHECK(parse_graph(R"({"n": 3, "edges": [[1, 2]]})").num_edges() == 1);
  CHECK_THROWS_AS(parse_graph("3 2\n1 2\n2 2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_graph("3 2\n1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("3 1\n1 4\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("3 1\n1 two\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("{\"n\": 3"), ParseError);
  CHECK_THROWS_AS(read_graph("/nonexistent/graph.txt"), IoError);
  try {
    parse_graph("3 2\n1 2\nbad line\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("fixtures are recognised up to relabelling") {
  CHECK(fixture("four-node").num_vertices() == 4);
  CHECK(enumerate_maximal_sets(fixture("house")).size() == 8);
  CHECK(match_fixture(fixture("house")) == "house");
  const Graph relabelled(4, {{3, 2}, {2, 1}, {2, 0}, {1, 0}});
  CHECK(match_fixture(relabelled) == "four-node");
  CHECK(match_fixture(gen_open_chain(4)) == "chain-4");
  CHECK_FALSE(match_fixture(Graph(4, {{0, 1}, {0, 2}, {0, 3}})).has_value());
  CHECK(fixture("chain-5") == gen_open_chain(5));
  CHECK_THROWS_AS(fixture("octagon"), InvalidArgument);
}
