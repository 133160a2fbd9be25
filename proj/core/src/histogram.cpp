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

#include "dptopk/histogram.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace dptopk {

Histogram build_histogram(std::vector<int64_t> scores) {
  if (scores.empty()) {
    throw std::invalid_argument("build_histogram: empty score vector");
  }
  int64_t max_score = scores[0];
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < 0) {
      throw std::invalid_argument("build_histogram: negative score at item " +
                                  std::to_string(i));
    }
    max_score = std::max(max_score, scores[i]);
  }
  return Histogram{std::move(scores), max_score};
}

TopScores top_scores(const Histogram& h, int k) {
  if (k < 1 || k > h.d()) {
    throw std::invalid_argument("top_scores: k must be in [1, d]");
  }
  std::vector<int64_t> work = h.scores;
  std::nth_element(work.begin(), work.begin() + (k - 1), work.end(),
                   std::greater<int64_t>());
  work.resize(k);
  std::sort(work.begin(), work.end(), std::greater<int64_t>());
  return TopScores{std::move(work)};
}

ValueIndex build_value_index(const Histogram& h, const TopScores& t,
                             int64_t tau_max) {
  if (tau_max < 1) {
    throw std::invalid_argument("build_value_index: tau_max must be >= 1");
  }
  ValueIndex vi;
  vi.cutoff = t.sorted[t.k() - 1] - tau_max;

  const auto& scores = h.scores;
  vi.slices.reserve(scores.size());
  for (int64_t v : scores) {
    auto [it, fresh] = vi.slices.try_emplace(v, 0u, 0u);
    it->second.second += 1;  // count pass
  }
  uint32_t offset = 0;
  vi.sorted_values.reserve(vi.slices.size());
  for (auto& [value, slice] : vi.slices) {
    uint32_t count = slice.second;
    slice = {offset, offset};  // end advances during the scatter pass
    offset += count;
    if (value > vi.cutoff) vi.sorted_values.push_back(value);
  }
  vi.items.resize(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    auto& slice = vi.slices[scores[i]];
    vi.items[slice.second++] = static_cast<int32_t>(i);
  }
  std::sort(vi.sorted_values.begin(), vi.sorted_values.end(),
            std::greater<int64_t>());
  return vi;
}

int64_t joint_loss(const Histogram& h, const TopScores& t, const Sequence& s) {
  if (static_cast<int>(s.size()) != t.k()) {
    throw std::invalid_argument("joint_loss: sequence length != k");
  }
  int64_t loss = 0;
  for (size_t j = 0; j < s.size(); ++j) {
    if (s[j] < 0 || s[j] >= h.d()) {
      throw std::invalid_argument("joint_loss: item id out of range");
    }
    loss = std::max(loss, t.sorted[j] - h.scores[s[j]]);
  }
  return loss;
}

int64_t truncated_loss(const Histogram& h, const TopScores& t,
                       const Sequence& s, int64_t tau) {
  if (tau < 1) {
    throw std::invalid_argument("truncated_loss: tau must be >= 1");
  }
  return std::min(joint_loss(h, t, s), tau);
}

}  // namespace dptopk
