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

#include <cmath>

#include "misca/error.hpp"
#include "misca/quantum.hpp"

namespace misca {

double open_chain_recursion_step(double theta, double p) {
  const double t2 = theta * theta;
  const double t4 = t2 * t2;
  return p * (1.0 - t4 / 3.0) + (1.0 - p) * (2.0 * t2 / 3.0 - t4 / 6.0);
}

double open_chain_recursion(double theta, int r) {
  if (r < 0) throw InvalidArgument("cycle count must be nonnegative");
  double p = 2.0 / 3.0;
  for (int k = 0; k < r; ++k) p = open_chain_recursion_step(theta, p);
  return p;
}

double open_chain_fixed_point(double theta) {
  const double t2 = theta * theta;
  return (4.0 - t2) / (4.0 + t2);
}

double asymptote_formula_3(double theta) {
  const double t2 = theta * theta;
  return 1.0 - t2 / (0.75 * t2 + 1.0);
}

double asymptote_formula_5(double theta) {
  const double t2 = theta * theta;
  return 1.0 - t2 / (5.0 / 16.0 + 147.0 / 160.0 * t2);
}

ThresholdAngle threshold_angle(double target) {
  if (!(target >= 2.0 / 3.0 && target < 1.0)) throw InvalidArgument("threshold must lie in [2/3, 1)");
  // The fixed point decreases from 1 at theta = 0 to 0 at theta = 2.
  double lo = 0.0;
  double hi = 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (open_chain_fixed_point(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), std::sqrt(4.0 * (1.0 - target) / (4.0 + 3.0 * target))};
}

}  // namespace misca
