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

#include "dptopk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dptopk/stats.hpp"

namespace dptopk {
namespace {

uint64_t sequence_key(const Sequence& s, int64_t d) {
  if (d > 255 || s.size() > 8) {
    throw std::invalid_argument("sequence_key: instance too large to encode");
  }
  uint64_t key = 0;
  for (int32_t item : s) key = (key << 8) | static_cast<uint64_t>(item + 1);
  return key;
}

void check_guard(int64_t d, int k, const EnumerationGuard& guard) {
  if (k < 1 || k > d) {
    throw std::invalid_argument("enumerate_sequences: k must be in [1, d]");
  }
  if (d <= guard.max_d && k <= guard.max_k) return;
  double estimate = 1.0;
  for (int i = 0; i < k; ++i) estimate *= static_cast<double>(d - i);
  throw std::invalid_argument(
      "enumeration guard exceeded: d=" + std::to_string(d) +
      ", k=" + std::to_string(k) + " spans about " +
      std::to_string(estimate) +
      " sequences; pass a larger EnumerationGuard to override");
}

}  // namespace

std::vector<Sequence> enumerate_sequences(int64_t d, int k,
                                          const EnumerationGuard& guard) {
  check_guard(d, k, guard);
  std::vector<Sequence> out;
  Sequence cur;
  std::vector<char> used(d, 0);
  // Depth-first in item order yields lexicographic order.
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      out.push_back(cur);
      return;
    }
    for (int64_t item = 0; item < d; ++item) {
      if (used[item]) continue;
      used[item] = 1;
      cur.push_back(static_cast<int32_t>(item));
      self(self, depth + 1);
      cur.pop_back();
      used[item] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

size_t ExactDistribution::index_of(const Sequence& s) const {
  auto it = index.find(sequence_key(s, d));
  if (it == index.end()) {
    throw std::invalid_argument("index_of: sequence not in support");
  }
  return it->second;
}

ExactDistribution exact_mechanism_distribution(const Histogram& h, int k,
                                               double epsilon, int64_t tau,
                                               bool extended_precision,
                                               const EnumerationGuard& guard) {
  if (!(epsilon > 0)) {
    throw std::invalid_argument(
        "exact_mechanism_distribution: epsilon must be positive");
  }
  if (tau < 0) {
    throw std::invalid_argument(
        "exact_mechanism_distribution: tau must be 0 (off) or >= 1");
  }
  ExactDistribution dist;
  dist.d = h.d();
  dist.k = k;
  dist.epsilon = epsilon;
  dist.tau = tau;
  dist.support = enumerate_sequences(dist.d, k, guard);

  TopScores t = top_scores(h, k);
  size_t n = dist.support.size();
  std::vector<int64_t> losses(n);
  int64_t min_loss = std::numeric_limits<int64_t>::max();
  for (size_t i = 0; i < n; ++i) {
    int64_t loss = joint_loss(h, t, dist.support[i]);
    if (tau >= 1) loss = std::min(loss, tau);
    losses[i] = loss;
    min_loss = std::min(min_loss, loss);
  }

  dist.masses.resize(n);
  dist.log_masses.resize(n);
  if (extended_precision) {
    long double z = 0.0L;
    long double comp = 0.0L;
    for (size_t i = 0; i < n; ++i) {
      long double term = std::exp(-0.5L * static_cast<long double>(epsilon) *
                                  static_cast<long double>(losses[i] - min_loss));
      long double next = z + term;
      comp += std::abs(z) >= std::abs(term) ? (z - next) + term
                                            : (term - next) + z;
      z = next;
    }
    long double log_z = std::log(z + comp);
    for (size_t i = 0; i < n; ++i) {
      long double log_mass = -0.5L * static_cast<long double>(epsilon) *
                                 static_cast<long double>(losses[i] - min_loss) -
                             log_z;
      dist.log_masses[i] = static_cast<double>(log_mass);
      dist.masses[i] = static_cast<double>(std::exp(log_mass));
    }
  } else {
    std::vector<double> log_weights(n);
    for (size_t i = 0; i < n; ++i) {
      log_weights[i] = -0.5 * epsilon * static_cast<double>(losses[i] - min_loss);
    }
    double log_z = log_sum_exp(log_weights);
    for (size_t i = 0; i < n; ++i) {
      dist.log_masses[i] = log_weights[i] - log_z;
      dist.masses[i] = std::exp(dist.log_masses[i]);
    }
  }

  dist.index.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    dist.index.emplace(sequence_key(dist.support[i], dist.d), i);
  }
  return dist;
}

bool are_neighbors(const Histogram& a, const Histogram& b) {
  if (a.d() != b.d()) return false;
  bool any_up = false;
  bool any_down = false;
  for (int64_t i = 0; i < a.d(); ++i) {
    int64_t diff = b.scores[i] - a.scores[i];
    if (diff > 1 || diff < -1) return false;
    if (diff == 1) any_up = true;
    if (diff == -1) any_down = true;
  }
  return !(any_up && any_down);
}

std::vector<Histogram> neighboring_histograms(const Histogram& h,
                                              int64_t max_d) {
  int64_t d = h.d();
  if (d > max_d) {
    throw std::invalid_argument(
        "neighboring_histograms: 2^d neighbors at d=" + std::to_string(d) +
        "; raise max_d to override");
  }
  std::vector<Histogram> out;
  for (uint64_t mask = 1; mask < (uint64_t{1} << d); ++mask) {
    Histogram up = h;
    for (int64_t i = 0; i < d; ++i) {
      if (mask & (uint64_t{1} << i)) up.scores[i] += 1;
    }
    up.max_score = *std::max_element(up.scores.begin(), up.scores.end());
    out.push_back(std::move(up));

    bool feasible = true;
    Histogram down = h;
    for (int64_t i = 0; i < d && feasible; ++i) {
      if (mask & (uint64_t{1} << i)) {
        if (down.scores[i] == 0) {
          feasible = false;
        } else {
          down.scores[i] -= 1;
        }
      }
    }
    if (feasible) {
      down.max_score = *std::max_element(down.scores.begin(), down.scores.end());
      out.push_back(std::move(down));
    }
  }
  return out;
}

double privacy_ratio(const Histogram& h, const Histogram& hprime, int k,
                     double epsilon, int64_t tau, bool extended_precision,
                     const EnumerationGuard& guard) {
  if (!are_neighbors(h, hprime)) {
    throw std::invalid_argument("privacy_ratio: inputs are not neighbors");
  }
  ExactDistribution p =
      exact_mechanism_distribution(h, k, epsilon, tau, extended_precision, guard);
  ExactDistribution q = exact_mechanism_distribution(hprime, k, epsilon, tau,
                                                     extended_precision, guard);
  double worst = 0.0;
  for (size_t i = 0; i < p.log_masses.size(); ++i) {
    worst = std::max(worst, std::abs(p.log_masses[i] - q.log_masses[i]));
  }
  return worst;
}

}  // namespace dptopk
