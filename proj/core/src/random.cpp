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

#include "dptopk/random.hpp"

#include <cmath>

namespace dptopk {
namespace {

// SplitMix64 finalizer, used to decorrelate seeds and stream ids.
uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomSource::RandomSource(uint64_t seed) : RandomSource(seed, mix64(seed)) {}

RandomSource::RandomSource(uint64_t seed, uint64_t mixed)
    : seed_(seed), engine_(mixed) {}

RandomSource RandomSource::derive(uint64_t id0, uint64_t id1) const {
  uint64_t child = mix64(mix64(seed_ ^ mix64(id0)) ^ mix64(~id1));
  return RandomSource(child, mix64(child));
}

double RandomSource::uniform_open() {
  // 53-bit mantissa shifted to the cell midpoints of a 2^-53 grid, so the
  // result lies strictly inside (0, 1).
  uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

uint64_t RandomSource::uniform_below(uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_below: n must be positive");
  }
  uint64_t limit =
      std::numeric_limits<uint64_t>::max() -
      std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double gumbel(RandomSource& rs, double b) {
  if (!(b > 0)) {
    throw std::invalid_argument("gumbel: scale must be positive");
  }
  return -b * std::log(-std::log(rs.uniform_open()));
}

double exponential_noise(RandomSource& rs, double scale) {
  if (!(scale > 0)) {
    throw std::invalid_argument("exponential_noise: scale must be positive");
  }
  return -scale * std::log(rs.uniform_open());
}

int gumbel_argmax(RandomSource& rs, std::span<const double> log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("gumbel_argmax: empty weight vector");
  }
  int best = -1;
  double best_key = kLogZero;
  for (size_t i = 0; i < log_weights.size(); ++i) {
    double w = log_weights[i];
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("gumbel_argmax: weight must be in [-inf, inf)");
    }
    if (w == kLogZero) continue;
    double key = w + gumbel(rs, 1.0);
    if (best < 0 || key > best_key) {
      best = static_cast<int>(i);
      best_key = key;
    }
  }
  if (best < 0) {
    throw std::invalid_argument("gumbel_argmax: all weights are zero");
  }
  return best;
}

}  // namespace dptopk
