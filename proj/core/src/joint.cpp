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

#include "dptopk/joint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bucket_pool.hpp"

namespace dptopk {

JointPairWalker::JointPairWalker(const Histogram& h, int k)
    : k_(k), d_(h.d()) {
  if (k < 1 || k > h.d()) {
    throw std::invalid_argument("JointPairWalker: k must be in [1, d]");
  }
  items_.resize(d_);
  std::iota(items_.begin(), items_.end(), 0);
  std::sort(items_.begin(), items_.end(), [&](int32_t a, int32_t b) {
    if (h.scores[a] != h.scores[b]) return h.scores[a] > h.scores[b];
    return a < b;
  });
  scores_.resize(d_);
  for (int64_t p = 0; p < d_; ++p) scores_[p] = h.scores[items_[p]];

  t_.assign(k_ + 1, 0);
  // All counters start at zero: term(l) = -(l - 1) is nonpositive for
  // every row, so the running sum of positive logs starts empty.
  nonpos_terms_ = k_;
  for (int i = 1; i <= k_; ++i) {
    heap_.push(HeapEntry{scores_[i - 1] - scores_[0], 1 - int64_t{i} * d_,
                         i, 1});
  }
}

void JointPairWalker::bump(int row) {
  int64_t term = t_[row] - (row - 1);
  t_[row] += 1;
  if (term > 0) {
    finite_log_sum_ += std::log(static_cast<double>(term + 1)) -
                       std::log(static_cast<double>(term));
  } else if (term + 1 > 0) {
    --nonpos_terms_;
    // term + 1 == 1 contributes log(1) = 0.
  }
}

bool JointPairWalker::next(Pair& out) {
  if (heap_.empty()) return false;
  HeapEntry e = heap_.top();
  heap_.pop();
  if (e.j < d_) {
    heap_.push(HeapEntry{scores_[e.i - 1] - scores_[e.j], (e.j + 1) - int64_t{e.i} * d_,
                         e.i, e.j + 1});
  }
  bump(e.i);
  int64_t own_term = t_[e.i] - (e.i - 1);
  int others_nonpos = nonpos_terms_ - (own_term <= 0 ? 1 : 0);
  double log_size;
  if (others_nonpos > 0) {
    log_size = kLogZero;
  } else {
    log_size = finite_log_sum_ -
               (own_term > 0 ? std::log(static_cast<double>(own_term)) : 0.0);
  }
  out = Pair{e.i, e.j, e.loss, log_size};
  return true;
}

Sequence joint_select(const Histogram& h, int k, double epsilon,
                      RandomSource& rs) {
  if (!(epsilon > 0)) {
    throw std::invalid_argument("joint_select: epsilon must be positive");
  }
  JointPairWalker walker(h, k);

  JointPairWalker::Pair pair;
  JointPairWalker::Pair best;
  double best_key = kLogZero;
  bool found = false;
  while (walker.next(pair)) {
    if (pair.log_size == kLogZero) continue;
    double key = pair.log_size - 0.5 * epsilon * static_cast<double>(pair.loss) +
                 gumbel(rs, 1.0);
    if (!found || key > best_key) {
      found = true;
      best_key = key;
      best = pair;
    }
  }
  if (!found) {
    throw std::logic_error("joint_select: no nonempty cell");
  }

  TopScores t{std::vector<int64_t>(walker.sorted_scores().begin(),
                                   walker.sorted_scores().begin() + k)};
  ValueIndex vi = build_value_index(h, t, best.loss + 1);
  internal::BucketPool pool(vi);
  Sequence s(k);
  int i0 = best.i - 1;
  s[i0] = walker.sorted_items()[best.j - 1];
  pool.set_skip(s[i0]);
  for (int j = 0; j < i0; ++j) {
    pool.expand_above(t.sorted[j] - best.loss);
    if (pool.empty()) {
      throw std::logic_error("joint_select: empty cell (head)");
    }
    s[j] = pool.pop_uniform(rs);
  }
  for (int j = i0 + 1; j < k; ++j) {
    pool.expand_above(t.sorted[j] - best.loss - 1);
    if (pool.empty()) {
      throw std::logic_error("joint_select: empty cell (tail)");
    }
    s[j] = pool.pop_uniform(rs);
  }
  return s;
}

}  // namespace dptopk
