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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace misca {

enum class FitModel {
  Power,        ///< y = gamma x^delta
  Exponential,  ///< y = exp(Gamma + Delta x)
  PowerRatio,   ///< T = alpha (N/k)^beta
  Cycles,       ///< r = a N^b
};

std::string_view to_string(FitModel m);

struct FitParam {
  std::string name;
  double value = 0;
  double std_error = 0;  ///< infinite when fewer than three points
};

struct ParityPoint {
  double x = 0;  ///< regressor in data space (N, k or N/k)
  double observed = 0;
  double fitted = 0;
};

struct FitResult {
  FitModel model = FitModel::Power;
  FitParam scale;     ///< gamma, Gamma, alpha or a
  FitParam exponent;  ///< delta, Delta, beta or b
  double rmse_log = 0;   ///< residual RMS of the linear regression in log y
  double rmse_data = 0;  ///< residual RMS of y itself
  std::size_t n_points = 0;
  std::vector<std::string> warnings;
  std::vector<ParityPoint> parity;
};

/// Log-log least squares. Throws InvalidArgument on fewer than two points,
/// nonpositive data or no spread in x.
FitResult fit_power(const std::vector<double>& xs, const std::vector<double>& ys);
/// Regression of log y on x.
FitResult fit_exponential(const std::vector<double>& xs, const std::vector<double>& ys);
/// Regression of log T on log(N/k).
FitResult fit_power_ratio(const std::vector<double>& ns, const std::vector<double>& ks, const std::vector<double>& ts);
FitResult fit_cycles(const std::vector<double>& ns, const std::vector<double>& rs);

std::string to_json(const FitResult& fit);
/// Columns x, observed, fitted.
std::string parity_csv(const FitResult& fit);

}  // namespace misca
