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

#include "misca/fit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "misca/error.hpp"
#include "misca/format.hpp"

namespace misca {

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::Power: return "power";
    case FitModel::Exponential: return "exponential";
    case FitModel::PowerRatio: return "power_ratio";
    case FitModel::Cycles: return "cycles";
  }
  return "power";
}

namespace {

struct Line {
  double a, b, se_a, se_b, rmse;
  bool underdetermined;
};

// Ordinary least squares u = a + b v with the usual standard errors.
Line regress(const std::vector<double>& v, const std::vector<double>& u) {
  const auto n = static_cast<double>(v.size());
  double mv = 0, mu = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mv += v[i];
    mu += u[i];
  }
  mv /= n;
  mu /= n;
  double svv = 0, svu = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    svv += (v[i] - mv) * (v[i] - mv);
    svu += (v[i] - mv) * (u[i] - mu);
  }
  if (!(svv > 0.0)) throw InvalidArgument("regressor has no spread");
  Line l{};
  l.b = svu / svv;
  l.a = mu - l.b * mv;
  double ssr = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = u[i] - (l.a + l.b * v[i]);
    ssr += r * r;
  }
  l.rmse = std::sqrt(ssr / n);
  l.underdetermined = v.size() < 3;
  if (l.underdetermined) {
    l.se_a = l.se_b = std::numeric_limits<double>::infinity();
  } else {
    const double s2 = ssr / (n - 2.0);
    l.se_b = std::sqrt(s2 / svv);
    l.se_a = std::sqrt(s2 * (1.0 / n + mv * mv / svv));
  }
  return l;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("fit inputs differ in length");
  if (a < 2) throw InvalidArgument("fit needs at least two points");
}

void check_positive(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

// Fits log y = a + b * f(x); power-type models report exp(a) as the scale.
FitResult finish(FitModel model, const char* scale, const char* exponent, bool exp_scale,
                 const std::vector<double>& xs, const std::vector<double>& regressor, const std::vector<double>& ys) {
  std::vector<double> u(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) u[i] = std::log(ys[i]);
  const Line l = regress(regressor, u);
  FitResult f;
  f.model = model;
  f.n_points = ys.size();
  if (exp_scale)
    f.scale = {scale, std::exp(l.a), std::exp(l.a) * l.se_a};
  else
    f.scale = {scale, l.a, l.se_a};
  f.exponent = {exponent, l.b, l.se_b};
  f.rmse_log = l.rmse;
  double ss = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double fitted = std::exp(l.a + l.b * regressor[i]);
    f.parity.push_back({xs[i], ys[i], fitted});
    ss += (ys[i] - fitted) * (ys[i] - fitted);
  }
  f.rmse_data = std::sqrt(ss / static_cast<double>(ys.size()));
  if (l.underdetermined) f.warnings.emplace_back("two points: standard errors are infinite");
  return f;
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
  return out;
}

}  // namespace

FitResult fit_power(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_sizes(xs.size(), ys.size());
  check_positive(xs, "x");
  check_positive(ys, "y");
  return finish(FitModel::Power, "gamma", "delta", true, xs, logs(xs), ys);
}

FitResult fit_exponential(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_sizes(xs.size(), ys.size());
  check_positive(ys, "y");
  for (double x : xs)
    if (!std::isfinite(x)) throw InvalidArgument("x must be finite");
  return finish(FitModel::Exponential, "Gamma", "Delta", false, xs, xs, ys);
}

FitResult fit_power_ratio(const std::vector<double>& ns, const std::vector<double>& ks, const std::vector<double>& ts) {
  check_sizes(ns.size(), ks.size());
  check_sizes(ns.size(), ts.size());
  check_positive(ns, "N");
  check_positive(ks, "k");
  check_positive(ts, "T");
  std::vector<double> ratio(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) ratio[i] = ns[i] / ks[i];
  return finish(FitModel::PowerRatio, "alpha", "beta", true, ratio, logs(ratio), ts);
}

FitResult fit_cycles(const std::vector<double>& ns, const std::vector<double>& rs) {
  check_sizes(ns.size(), rs.size());
  check_positive(ns, "N");
  check_positive(rs, "r");
  return finish(FitModel::Cycles, "a", "b", true, ns, logs(ns), rs);
}

std::string to_json(const FitResult& f) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(f.model));
  for (const FitParam* p : {&f.scale, &f.exponent}) {
    j["params"][p->name] = num(p->value);
    j["std_errors"][p->name] = num(p->std_error);
  }
  j["rmse_log"] = f.rmse_log;
  j["rmse_data"] = f.rmse_data;
  j["n_points"] = f.n_points;
  j["warnings"] = f.warnings;
  return j.dump(2);
}

std::string parity_csv(const FitResult& f) {
  std::ostringstream os;
  os << "x,observed,fitted\n";
  for (const auto& p : f.parity) os << format_double(p.x) << ',' << format_double(p.observed) << ',' << format_double(p.fitted) << '\n';
  return os.str();
}

}  // namespace misca
