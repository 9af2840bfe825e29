// Copyright 2026 The PWSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwsm/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pwsm {
namespace {

void check_series(std::span<const Histogram> released,
                  std::span<const Histogram> truth) {
  if (released.empty() || truth.empty()) {
    throw std::invalid_argument("length mismatch: empty histogram series");
  }
  if (released.size() != truth.size()) {
    throw std::invalid_argument(
        "length mismatch: released and true series differ in slot count");
  }
  for (std::size_t i = 0; i < released.size(); ++i) {
    if (released[i].size() != truth[i].size()) {
      throw std::invalid_argument(
          "length mismatch: released and true histograms differ in bin "
          "count");
    }
  }
}

// x * ln(x / y) with the conventional continuous extension 0 * ln(0) = 0.
double x_log_x_over_y(double x, double y) {
  if (x <= 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

double amre(std::span<const Histogram> released,
            std::span<const Histogram> truth) {
  check_series(released, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < released.size(); ++i) {
    const auto& r = released[i].bins();
    const auto& c = truth[i].bins();
    double sq = 0.0;
    for (std::size_t b = 0; b < r.size(); ++b) {
      const double diff = r[b] - c[b];
      sq += diff * diff;
    }
    total += sq / static_cast<double>(r.size());
  }
  return total / static_cast<double>(released.size());
}

double ajsd(std::span<const Histogram> released,
            std::span<const Histogram> truth) {
  check_series(released, truth);
  double total = 0.0;
  std::vector<double> p;
  std::vector<double> q;
  for (std::size_t i = 0; i < released.size(); ++i) {
    const auto& r = released[i].bins();
    const auto& c = truth[i].bins();
    const std::size_t d = r.size();

    p.assign(d, 0.0);
    double released_total = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
      p[b] = r[b] > 0.0 ? r[b] : 0.0;
      released_total += p[b];
    }
    if (released_total > 0.0) {
      for (double& v : p) v /= released_total;
    } else {
      // A release with no mass carries no information; score it as the
      // uniform distribution rather than dividing by zero.
      for (double& v : p) v = 1.0 / static_cast<double>(d);
    }

    double truth_total = 0.0;
    for (std::size_t b = 0; b < d; ++b) truth_total += c[b];
    if (!(truth_total > 0.0)) {
      throw std::invalid_argument(
          "invalid histogram: true histogram has no mass");
    }
    q.assign(d, 0.0);
    for (std::size_t b = 0; b < d; ++b) q[b] = c[b] / truth_total;

    double jsd = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
      const double m = 0.5 * (p[b] + q[b]);
      if (m > 0.0) {
        jsd += 0.5 * x_log_x_over_y(p[b], m) + 0.5 * x_log_x_over_y(q[b], m);
      }
    }
    total += jsd;
  }
  return total / static_cast<double>(released.size());
}

}  // namespace pwsm
