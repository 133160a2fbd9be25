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

#ifndef DPTOPK_JOINT_H_
#define DPTOPK_JOINT_H_

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "dptopk/histogram.hpp"
#include "dptopk/random.hpp"

namespace dptopk {

// Enumerates the d*k cells (i, j) of the rank/position partition of
// candidate sequences in increasing order of the perturbed key
//
//   loss_{i,j} - i/(2k) + j/(2dk),   loss_{i,j} = H[i] - H[j],
//
// where H is the score multiset sorted in non-increasing order (1-based).
// The fractional perturbation realizes the lexicographic order
// (loss, j - i*d) and makes every row already sorted by j, so the walk is
// a k-way merge. Cell (i, j) holds the sequences whose rank-i entry is the
// item at sorted position j and whose first rank attaining the maximum
// per-rank loss is i.
//
// Along the walk the per-rank counters t[l] = #{j' : key(l, j') <= current
// key} change by exactly one increment (at l = i) per step, which yields
// ln|cell| in O(1) per cell:
//
//   ln|U_{i,j}| = sum_{l != i} ln(t[l] - (l - 1)).
class JointPairWalker {
 public:
  // Requires 1 <= k <= d.
  JointPairWalker(const Histogram& h, int k);

  struct Pair {
    int i = 0;             // rank position, 1-based
    int64_t j = 0;         // sorted position, 1-based
    int64_t loss = 0;      // may be negative; such cells are always empty
    double log_size = 0.;  // kLogZero for empty cells
  };

  // Emits the next cell in key order. Returns false once all d*k cells
  // have been produced.
  bool next(Pair& out);

  // Current counter values t[1..k], for verification against recounts.
  std::span<const int64_t> counters() const {
    return std::span<const int64_t>(t_).subspan(1);
  }

  // Item id at each sorted position (0-based position index).
  const std::vector<int32_t>& sorted_items() const { return items_; }
  std::span<const int64_t> sorted_scores() const { return scores_; }

 private:
  struct HeapEntry {
    int64_t loss;
    int64_t tie;  // j - i*d, distinct across cells
    int i;
    int64_t j;
    bool operator>(const HeapEntry& o) const {
      if (loss != o.loss) return loss > o.loss;
      return tie > o.tie;
    }
  };

  void bump(int row);

  int k_;
  int64_t d_;
  std::vector<int32_t> items_;
  std::vector<int64_t> scores_;
  std::vector<int64_t> t_;  // t_[0] unused
  double finite_log_sum_ = 0.0;
  int nonpos_terms_ = 0;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>,
                      std::greater<HeapEntry>>
      heap_;
};

// Reference mechanism: samples a sequence with probability proportional to
// exp(-epsilon * loss / 2) by walking all d*k cells (Gumbel argmax over
// cell weights) and then drawing uniformly inside the winning cell.
// O(d log d + d k) time. No loss truncation.
Sequence joint_select(const Histogram& h, int k, double epsilon,
                      RandomSource& rs);

}  // namespace dptopk

#endif  // DPTOPK_JOINT_H_
