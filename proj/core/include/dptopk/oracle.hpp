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

#ifndef DPTOPK_ORACLE_H_
#define DPTOPK_ORACLE_H_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dptopk/histogram.hpp"

namespace dptopk {

// Brute-force enumeration is exponential; the guard forces callers to opt
// in explicitly beyond small instances.
struct EnumerationGuard {
  int64_t max_d = 8;
  int max_k = 4;
};

// All length-k sequences of distinct items from [0, d), in lexicographic
// order. Throws (with a size estimate) when the guard is exceeded.
std::vector<Sequence> enumerate_sequences(int64_t d, int k,
                                          const EnumerationGuard& guard = {});

// The full output distribution of the sequence exponential mechanism,
// computed by direct enumeration. Support is in lexicographic order.
struct ExactDistribution {
  int64_t d = 0;
  int k = 0;
  double epsilon = 0.0;
  int64_t tau = 0;  // 0 means untruncated
  std::vector<Sequence> support;
  std::vector<double> masses;
  std::vector<double> log_masses;

  // Position of s in `support`; throws if s is not a valid sequence.
  size_t index_of(const Sequence& s) const;

  std::unordered_map<uint64_t, size_t> index;
};

// Enumerates every candidate sequence, scores it with the (optionally
// truncated) ranked-error loss and normalizes exp(-epsilon * loss / 2).
// tau = 0 disables truncation; tau >= 1 truncates. extended_precision
// evaluates the normalizer and log-masses in long double off the exact
// integer loss histogram.
ExactDistribution exact_mechanism_distribution(
    const Histogram& h, int k, double epsilon, int64_t tau = 0,
    bool extended_precision = false, const EnumerationGuard& guard = {});

// True when one user's 0/1 contribution vector separates a from b:
// b - a or a - b lies in {0,1}^d.
bool are_neighbors(const Histogram& a, const Histogram& b);

// Every neighbor of h: h + v for all nonzero v in {0,1}^d, plus h - v for
// those keeping all scores non-negative. 2^d scaling; guarded by max_d.
std::vector<Histogram> neighboring_histograms(const Histogram& h,
                                              int64_t max_d = 10);

// max_s |ln Pr_h[s] - ln Pr_h'[s]| over the common support. Requires
// neighboring inputs with equal d. For an epsilon-DP mechanism this never
// exceeds epsilon.
double privacy_ratio(const Histogram& h, const Histogram& hprime, int k,
                     double epsilon, int64_t tau = 0,
                     bool extended_precision = false,
                     const EnumerationGuard& guard = {});

}  // namespace dptopk

#endif  // DPTOPK_ORACLE_H_
