// Copyright 2026 The dptopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dptopk/peel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dptopk {
namespace {

void validate_common(const Histogram& h, int k, double epsilon) {
  if (k < 1 || k > h.d()) {
    throw std::invalid_argument("k must be in [1, d]");
  }
  if (!(epsilon > 0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

}  // namespace

double cdp_peel_round_epsilon(int k, double epsilon, double delta) {
  if (k < 1) {
    throw std::invalid_argument("cdp_peel_round_epsilon: k must be >= 1");
  }
  if (!(epsilon > 0)) {
    throw std::invalid_argument("cdp_peel_round_epsilon: epsilon must be positive");
  }
  if (!(delta > 0) || !(delta < 1)) {
    throw std::invalid_argument("cdp_peel_round_epsilon: delta must be in (0, 1)");
  }
  double log_inv_delta = std::log(1.0 / delta);
  auto spent = [&](double eps0) {
    double rho = static_cast<double>(k) * eps0 * eps0 / 8.0;
    return rho + 2.0 * std::sqrt(rho * log_inv_delta);
  };
  double hi = 1.0;
  while (spent(hi) <= epsilon) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12 * hi) {
    double mid = 0.5 * (lo + hi);
    if (spent(mid) <= epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Sequence cdp_peel_select(const Histogram& h, int k, double epsilon,
                         double delta, RandomSource& rs) {
  validate_common(h, k, epsilon);
  double eps0 = cdp_peel_round_epsilon(k, epsilon, delta);
  int64_t d = h.d();
  std::vector<std::pair<double, int32_t>> noisy(d);
  for (int64_t i = 0; i < d; ++i) {
    noisy[i] = {static_cast<double>(h.scores[i]) + gumbel(rs, 2.0 / eps0),
                static_cast<int32_t>(i)};
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::nth_element(noisy.begin(), noisy.begin() + (k - 1), noisy.end(), better);
  std::sort(noisy.begin(), noisy.begin() + k, better);
  Sequence s(k);
  for (int j = 0; j < k; ++j) s[j] = noisy[j].second;
  return s;
}

Sequence pnf_peel_select(const Histogram& h, int k, double epsilon,
                         RandomSource& rs, bool monotone) {
  validate_common(h, k, epsilon);
  double scale = (monotone ? 1.0 : 2.0) * static_cast<double>(k) / epsilon;
  int64_t d = h.d();
  std::vector<char> selected(d, 0);
  Sequence s(k);
  for (int round = 0; round < k; ++round) {
    double best = -std::numeric_limits<double>::infinity();
    int64_t best_item = -1;
    for (int64_t i = 0; i < d; ++i) {
      if (selected[i]) continue;
      double noisy = static_cast<double>(h.scores[i]) +
                     exponential_noise(rs, scale);
      if (noisy > best) {
        best = noisy;
        best_item = i;
      }
    }
    selected[best_item] = 1;
    s[round] = static_cast<int32_t>(best_item);
  }
  return s;
}

}  // namespace dptopk
