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

#ifndef DPTOPK_RANDOM_H_
#define DPTOPK_RANDOM_H_

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace dptopk {

// Sentinel for log-weights of impossible outcomes. gumbel_argmax never
// returns an index whose weight is kLogZero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Deterministic random source. Two instances built from the same seed
// produce identical draws, and child sources derived with the same ids are
// identical regardless of how much the parent has been consumed, which keeps
// parallel benchmark repetitions reproducible.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  // Independent child stream keyed by (seed, ids...). Derivation depends
  // only on the construction seed, never on draws already made.
  RandomSource derive(uint64_t id0, uint64_t id1 = 0) const;

  uint64_t seed() const { return seed_; }

  // Uniform draw from the open interval (0, 1). Never returns 0 or 1, so
  // log(u) and log(-log(u)) are always finite.
  double uniform_open();

  // Unbiased uniform integer from [0, n). Requires n > 0.
  uint64_t uniform_below(uint64_t n);

  uint64_t next_u64() { return engine_(); }

 private:
  RandomSource(uint64_t seed, uint64_t mixed);

  uint64_t seed_;
  std::mt19937_64 engine_;
};

// Sample from the Gumbel distribution with location 0 and scale b > 0.
double gumbel(RandomSource& rs, double b);

// Sample from the exponential distribution with mean `scale` > 0.
double exponential_noise(RandomSource& rs, double scale);

// Index of the maximum of log_weights[i] + Gumbel(1) noise. Equivalent to
// sampling index i with probability proportional to exp(log_weights[i]).
// Entries may be kLogZero (never selected); at least one entry must be
// finite and none may be NaN or +infinity.
int gumbel_argmax(RandomSource& rs, std::span<const double> log_weights);

// Remove and return a uniformly random element of `a` in O(1) by swapping
// the chosen element with the last one. Requires a non-empty.
template <typename T>
T array_sampler_pop(std::vector<T>& a, RandomSource& rs) {
  if (a.empty()) {
    throw std::invalid_argument("array_sampler_pop: empty array");
  }
  size_t idx = static_cast<size_t>(rs.uniform_below(a.size()));
  T out = a[idx];
  a[idx] = a.back();
  a.pop_back();
  return out;
}

}  // namespace dptopk

#endif  // DPTOPK_RANDOM_H_
