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

#ifndef DPTOPK_FASTJOINT_H_
#define DPTOPK_FASTJOINT_H_

#include <cstdint>
#include <vector>

#include "dptopk/histogram.hpp"
#include "dptopk/random.hpp"

namespace dptopk {

// Parameters of the sequence-valued exponential mechanism with the ranked
// error as its loss. Sensitivity is fixed at 1 (add/remove one user).
struct MechanismParams {
  int k = 1;
  double epsilon = 1.0;
  double beta = 0.0009765625;  // 2^-10
};

// Loss threshold: losses at or above tau collapse into one shared value.
// tau = ceil((2/epsilon) * (sum_{j=d-k+1}^{d} ln j + ln(1/beta))), chosen so
// the collapsed region carries at most beta of the output mass.
int64_t compute_tau(int64_t d, int k, double epsilon, double beta);

// Identifies one cell of the loss-stratified partition of candidate
// sequences: all sequences with truncated loss `loss` whose first rank
// position attaining it is `bind` (0-based). loss == tau denotes the
// merged cell of everything with loss >= tau.
struct GroupId {
  int64_t loss = 0;
  int bind = 0;

  bool operator==(const GroupId&) const = default;
};

// counts.at(r, j) = |{items : score >= t.sorted[j] - r}| for r in
// [0, tau-1], and the strict variant |{items : score > t.sorted[j]}| in
// row r = -1.
struct CountsTable {
  int64_t tau = 0;
  int k = 0;
  std::vector<int64_t> cells;  // (tau + 1) rows, row r stored at r + 1
  int64_t steps = 0;           // work units spent building the table

  int64_t at(int64_t r, int j) const { return cells[(r + 1) * k + j]; }
};

// Fills the table column-recurrence by -recurrence: row 0 from the value
// index at the top-k scores, each later row by adding the count of the one
// value that enters. O(tau * k) expected time after the value index.
CountsTable compute_counts(const Histogram& h, const TopScores& t,
                           const ValueIndex& vi, int64_t tau);

// Log-sizes of every partition cell, with running prefix/suffix log-sums
// so each cell costs O(1). Rows 0..tau-1 are exact losses; row tau is the
// merged cell. tau here is the effective threshold: the requested one
// clamped to max_loss + 1, beyond which every cell of larger loss is empty
// and the output distribution is unchanged.
struct GroupIndex {
  int64_t d = 0;
  int k = 0;
  int64_t tau = 0;            // effective threshold (row count - 1)
  int64_t tau_requested = 0;  // threshold before clamping
  CountsTable counts;
  std::vector<double> prefix;    // (tau+1) x (k+1)
  std::vector<double> suffix;    // (tau+1) x (k+1)
  std::vector<double> log_size;  // (tau+1) x k
  int64_t steps = 0;

  double log_size_at(int64_t r, int bind) const {
    return log_size[r * k + bind];
  }
  // Count with the merged row unified to d.
  int64_t unified_count(int64_t r, int j) const {
    return r >= tau ? d : counts.at(r, j);
  }
};

// Requires tau >= 1 and vi built with tau_max >= min(tau, max_loss + 1).
GroupIndex build_group_index(const Histogram& h, const TopScores& t,
                             const ValueIndex& vi, int64_t tau);

// Draws a partition cell with probability proportional to
// |cell| * exp(-epsilon * loss / 2) via one Gumbel pass over the index.
GroupId subset_sampling(const GroupIndex& gi, double epsilon,
                        RandomSource& rs);

// Draws a uniform sequence from the given cell in O(d + k + pool) time
// using the dynamic-array sampler over value buckets. `tau` must be the
// effective threshold of the index the cell came from. Throws
// std::runtime_error if the cell is empty.
Sequence sequence_sampling(const GroupId& gid, const Histogram& h,
                           const TopScores& t, const ValueIndex& vi,
                           int64_t tau, RandomSource& rs,
                           int64_t* steps = nullptr);

// Maps a sequence to the partition cell containing it: the inverse of
// sequence_sampling's support. tau must be >= 1.
GroupId classify_sequence(const Histogram& h, const TopScores& t,
                          const Sequence& s, int64_t tau);

// Optional instrumentation filled by fastjoint_select.
struct FastJointStats {
  int64_t steps = 0;           // total work units across all stages
  int64_t tau_requested = 0;   // compute_tau output
  int64_t tau = 0;             // effective threshold after clamping
  GroupId selected{};
};

// The full mechanism: threshold, value index, counts, group index, cell
// draw, uniform sequence draw. O(d + tau * k) expected time.
Sequence fastjoint_select(const Histogram& h, const MechanismParams& params,
                          RandomSource& rs, FastJointStats* stats = nullptr);

// Same, with the threshold forced rather than derived from beta.
Sequence fastjoint_select_with_tau(const Histogram& h, int k, double epsilon,
                                   int64_t tau, RandomSource& rs,
                                   FastJointStats* stats = nullptr);

}  // namespace dptopk

#endif  // DPTOPK_FASTJOINT_H_
