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

#include <cmath>
#include <limits>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/fit.hpp"

using namespace misca;

namespace {

bool rel_close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

}  // namespace

TEST_CASE("power law recovered exactly") {
  std::vector<double> xs{10, 20, 50, 100, 200, 500, 1000}, ys;
  for (double x : xs) ys.push_back(71.2 * std::pow(x, 0.12));
  const auto f = fit_power(xs, ys);
  CHECK(rel_close(f.scale.value, 71.2, 1e-10));
  CHECK(rel_close(f.exponent.value, 0.12, 1e-10));
  CHECK(f.rmse_log < 1e-12);
  CHECK(f.n_points == 7);
  CHECK(f.warnings.empty());
  CHECK(f.parity.size() == 7);
}

TEST_CASE("exponential recovered exactly") {
  std::vector<double> xs{1.5, 2, 2.5, 3, 4, 5}, ys;
  for (double x : xs) ys.push_back(std::exp(1.66 + 0.89 * x));
  const auto f = fit_exponential(xs, ys);
  CHECK(rel_close(f.scale.value, 1.66, 1e-10));
  CHECK(rel_close(f.exponent.value, 0.89, 1e-10));
  std::vector<double> flat(xs.size(), 3.0);
  const auto c = fit_exponential(xs, flat);
  CHECK(rel_close(c.scale.value, std::log(3.0), 1e-12));
  CHECK(std::abs(c.exponent.value) < 1e-14);
}

TEST_CASE("power ratio recovered exactly") {
  std::vector<double> ns{10, 12, 14, 16, 20}, ks{1.5, 2.0, 3.0, 4.0, 5.0}, ts;
  for (std::size_t i = 0; i < ns.size(); ++i) ts.push_back(2.48 * std::pow(ns[i] / ks[i], 0.5));
  const auto f = fit_power_ratio(ns, ks, ts);
  CHECK(rel_close(f.scale.value, 2.48, 1e-10));
  CHECK(rel_close(f.exponent.value, 0.5, 1e-10));
  CHECK(f.rmse_data < 1e-10);
  CHECK_THROWS_AS(fit_power_ratio({10, 20}, {2, 4}, {1, 2}), InvalidArgument);
}

TEST_CASE("cycle law recovered exactly") {
  std::vector<double> ns{3, 5, 7, 9}, rs;
  for (double n : ns) rs.push_back(0.7 * std::pow(n, 3.12));
  const auto f = fit_cycles(ns, rs);
  CHECK(rel_close(f.scale.value, 0.7, 1e-10));
  CHECK(rel_close(f.exponent.value, 3.12, 1e-10));
  CHECK(f.model == FitModel::Cycles);
}

TEST_CASE("standard errors match the textbook formula") {
  std::vector<double> xs{1, 2, 3, 4, 5}, ys{1.1, 1.9, 3.2, 3.9, 5.2};
  const auto f = fit_exponential(xs, std::vector<double>{std::exp(1.1), std::exp(1.9), std::exp(3.2), std::exp(3.9), std::exp(5.2)});
  // Ordinary least squares of y on x by hand.
  const double xbar = 3, ybar = (1.1 + 1.9 + 3.2 + 3.9 + 5.2) / 5;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < 5; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  const double b = sxy / sxx, a = ybar - b * xbar;
  double sse = 0;
  for (int i = 0; i < 5; ++i) sse += std::pow(ys[i] - a - b * xs[i], 2);
  const double s2 = sse / 3;
  CHECK(f.exponent.value == doctest::Approx(b).epsilon(1e-12));
  CHECK(f.exponent.std_error == doctest::Approx(std::sqrt(s2 / sxx)).epsilon(1e-10));
  CHECK(f.scale.std_error == doctest::Approx(std::sqrt(s2 * (1.0 / 5 + xbar * xbar / sxx))).epsilon(1e-10));
  CHECK(f.rmse_log == doctest::Approx(std::sqrt(sse / 5)).epsilon(1e-10));
}

TEST_CASE("two points give a fit with infinite errors") {
  const auto f = fit_cycles({3, 5}, {2, 10});
  CHECK(std::isinf(f.exponent.std_error));
  CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("fit input validation") {
  CHECK_THROWS_AS(fit_power({1}, {1}), InvalidArgument);
  CHECK_THROWS_AS(fit_power({1, 2, 3}, {1, -2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_power({0, 2, 3}, {1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_power({1, 2}, {1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_exponential({2, 2, 2}, {1, 2, 3}), InvalidArgument);
}

TEST_CASE("fit serialisation") {
  const auto f = fit_power({1, 2, 4}, {3, 6, 12});
  const auto j = nlohmann::json::parse(to_json(f));
  CHECK(j.at("model") == "power");
  CHECK(j.at("params").size() == 2);
  const auto csv = parity_csv(f);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
