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

#ifndef DPTOPK_HISTOGRAM_H_
#define DPTOPK_HISTOGRAM_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace dptopk {

// Item scores indexed by item id in [0, d).
struct Histogram {
  std::vector<int64_t> scores;
  int64_t max_score = 0;

  int64_t d() const { return static_cast<int64_t>(scores.size()); }
};

// A length-k sequence of distinct item ids, ordered by rank.
using Sequence = std::vector<int32_t>;

// Validates the scores (non-empty, non-negative) and caches the maximum.
Histogram build_histogram(std::vector<int64_t> scores);

// The k largest scores of h in non-increasing order, with multiplicity.
// sorted[j] is the score a correct answer places at rank j.
struct TopScores {
  std::vector<int64_t> sorted;

  int k() const { return static_cast<int>(sorted.size()); }
};

// Requires 1 <= k <= d. O(d + k log k) via selection, not a full sort.
TopScores top_scores(const Histogram& h, int k);

// Items grouped by score value. `items` stores all d item ids grouped by
// value; `slices` maps a value to its [begin, end) range in `items`.
// `sorted_values` lists, in decreasing order, only the distinct values
// strictly above `cutoff`; values at or below the cutoff stay indexed in
// `slices` but are not enumerated.
struct ValueIndex {
  std::unordered_map<int64_t, std::pair<uint32_t, uint32_t>> slices;
  std::vector<int32_t> items;
  std::vector<int64_t> sorted_values;
  int64_t cutoff = 0;

  std::span<const int32_t> group(int64_t value) const {
    auto it = slices.find(value);
    if (it == slices.end()) return {};
    return std::span<const int32_t>(items).subspan(
        it->second.first, it->second.second - it->second.first);
  }
  int64_t group_size(int64_t value) const {
    return static_cast<int64_t>(group(value).size());
  }
};

// Builds the value index with cutoff = t.sorted[k-1] - tau_max, so every
// value a sampler can ask to enumerate is present in sorted_values.
// O(d) expected time plus sorting the retained distinct values.
ValueIndex build_value_index(const Histogram& h, const TopScores& t,
                             int64_t tau_max);

// The ranked error max_j (t.sorted[j] - h.scores[s[j]]) of a candidate
// sequence: how far, at the worst rank, the sequence falls short of the
// true top-k scores. Zero iff s is an exact top-k answer. Requires
// s.size() == t.k() and every entry a valid item id.
int64_t joint_loss(const Histogram& h, const TopScores& t, const Sequence& s);

// min(joint_loss(h, t, s), tau) for tau >= 1.
int64_t truncated_loss(const Histogram& h, const TopScores& t,
                       const Sequence& s, int64_t tau);

}  // namespace dptopk

#endif  // DPTOPK_HISTOGRAM_H_
