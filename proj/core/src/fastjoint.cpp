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

#include "dptopk/fastjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bucket_pool.hpp"

namespace dptopk {
namespace {

double log_pos(int64_t x) { return x > 0 ? std::log(static_cast<double>(x)) : kLogZero; }

int64_t max_possible_loss(const Histogram& h, const TopScores& t) {
  int64_t min_score = *std::min_element(h.scores.begin(), h.scores.end());
  return t.sorted[0] - min_score;
}

void validate_mechanism_args(const Histogram& h, int k, double epsilon) {
  if (k < 1 || k > h.d()) {
    throw std::invalid_argument("k must be in [1, d]");
  }
  if (!(epsilon > 0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
}

}  // namespace

int64_t compute_tau(int64_t d, int k, double epsilon, double beta) {
  if (d < 1 || k < 1 || k > d) {
    throw std::invalid_argument("compute_tau: k must be in [1, d]");
  }
  if (!(epsilon > 0)) {
    throw std::invalid_argument("compute_tau: epsilon must be positive");
  }
  if (!(beta > 0) || !(beta < 1)) {
    throw std::invalid_argument("compute_tau: beta must be in (0, 1)");
  }
  // ln(d!/(d-k)!) + ln(k!/k!) terms fold into one sum of k logs.
  double log_candidates = 0.0;
  for (int64_t j = d - k + 1; j <= d; ++j) {
    log_candidates += std::log(static_cast<double>(j));
  }
  double arg = (2.0 / epsilon) * (log_candidates + std::log(1.0 / beta));
  // Slack keeps exact-integer arguments from rounding up one row.
  int64_t tau = static_cast<int64_t>(std::ceil(arg - 1e-9));
  return std::max<int64_t>(1, tau);
}

CountsTable compute_counts(const Histogram& h, const TopScores& t,
                           const ValueIndex& vi, int64_t tau) {
  if (tau < 1) {
    throw std::invalid_argument("compute_counts: tau must be >= 1");
  }
  const int k = t.k();
  CountsTable ct;
  ct.tau = tau;
  ct.k = k;
  ct.cells.assign(static_cast<size_t>(tau + 1) * k, 0);

  int64_t* strict = ct.cells.data();        // row -1
  int64_t* base = ct.cells.data() + k;      // row 0
  int64_t acc = 0;
  for (int j = 0; j < k; ++j) {
    int64_t eq = vi.group_size(t.sorted[j]);
    if (j == 0 || t.sorted[j - 1] != t.sorted[j]) acc += eq;
    base[j] = acc;
    strict[j] = acc - eq;
    ct.steps += 2;
  }
  for (int64_t r = 1; r < tau; ++r) {
    const int64_t* prev = ct.cells.data() + r * k;
    int64_t* cur = ct.cells.data() + (r + 1) * k;
    for (int j = 0; j < k; ++j) {
      cur[j] = prev[j] + vi.group_size(t.sorted[j] - r);
      ++ct.steps;
    }
  }
  return ct;
}

GroupIndex build_group_index(const Histogram& h, const TopScores& t,
                             const ValueIndex& vi, int64_t tau) {
  if (tau < 1) {
    throw std::invalid_argument("build_group_index: tau must be >= 1");
  }
  GroupIndex gi;
  gi.d = h.d();
  gi.k = t.k();
  gi.tau_requested = tau;
  gi.tau = std::min(tau, max_possible_loss(h, t) + 1);
  gi.counts = compute_counts(h, t, vi, gi.tau);

  const int k = gi.k;
  const int64_t rows = gi.tau + 1;
  gi.prefix.assign(static_cast<size_t>(rows) * (k + 1), 0.0);
  gi.suffix.assign(static_cast<size_t>(rows) * (k + 1), 0.0);
  gi.log_size.assign(static_cast<size_t>(rows) * k, 0.0);

  for (int64_t r = 0; r < rows; ++r) {
    double* pre = gi.prefix.data() + r * (k + 1);
    double* suf = gi.suffix.data() + r * (k + 1);
    double* sz = gi.log_size.data() + r * k;
    pre[0] = 0.0;
    for (int j = 0; j < k; ++j) {
      pre[j + 1] = pre[j] + log_pos(gi.unified_count(r - 1, j) - j);
    }
    suf[k] = 0.0;
    for (int j = k - 1; j >= 0; --j) {
      suf[j] = suf[j + 1] + log_pos(gi.unified_count(r, j) - j);
    }
    for (int j = 0; j < k; ++j) {
      double mid = r < gi.tau
                       ? log_pos(gi.counts.at(r, j) - gi.counts.at(r - 1, j))
                       : log_pos(gi.d - gi.counts.at(gi.tau - 1, j));
      sz[j] = pre[j] + mid + suf[j + 1];
    }
    gi.steps += 3 * k;
  }
  gi.steps += gi.counts.steps;
  return gi;
}

GroupId subset_sampling(const GroupIndex& gi, double epsilon,
                        RandomSource& rs) {
  if (!(epsilon > 0)) {
    throw std::invalid_argument("subset_sampling: epsilon must be positive");
  }
  std::vector<double> log_weights(gi.log_size.size());
  for (int64_t r = 0; r <= gi.tau; ++r) {
    for (int j = 0; j < gi.k; ++j) {
      log_weights[r * gi.k + j] =
          gi.log_size_at(r, j) - 0.5 * epsilon * static_cast<double>(r);
    }
  }
  int flat = gumbel_argmax(rs, log_weights);
  return GroupId{flat / gi.k, flat % gi.k};
}

Sequence sequence_sampling(const GroupId& gid, const Histogram& h,
                           const TopScores& t, const ValueIndex& vi,
                           int64_t tau, RandomSource& rs, int64_t* steps) {
  const int k = t.k();
  const int64_t d = h.d();
  const int64_t r = gid.loss;
  const int i0 = gid.bind;
  if (tau < 1 || r < 0 || r > tau || i0 < 0 || i0 >= k) {
    throw std::invalid_argument("sequence_sampling: group id out of range");
  }
  const bool merged = (r == tau);

  internal::BucketPool pool(vi);
  Sequence s(k);
  int64_t local_steps = k;

  for (int j = 0; j < i0; ++j) {
    pool.expand_above(t.sorted[j] - r);
    if (pool.empty()) {
      throw std::runtime_error("sequence_sampling: empty group (head)");
    }
    s[j] = pool.pop_uniform(rs);
  }

  if (!merged) {
    auto bucket = vi.group(t.sorted[i0] - r);
    if (bucket.empty()) {
      throw std::runtime_error("sequence_sampling: empty group (pivot)");
    }
    s[i0] = bucket[rs.uniform_below(bucket.size())];
    pool.set_skip(s[i0]);
    for (int j = i0 + 1; j < k; ++j) {
      pool.expand_above(t.sorted[j] - r - 1);
      if (pool.empty()) {
        throw std::runtime_error("sequence_sampling: empty group (tail)");
      }
      s[j] = pool.pop_uniform(rs);
    }
    local_steps += pool.appends() + static_cast<int64_t>(pool.expanded_buckets());
  } else {
    pool.expand_above(t.sorted[i0] - tau);
    std::vector<char> taken(d, 0);
    pool.mark_expanded(taken);
    std::vector<int32_t> rest;
    for (int64_t item = 0; item < d; ++item) {
      if (!taken[item]) rest.push_back(static_cast<int32_t>(item));
    }
    if (rest.empty()) {
      throw std::runtime_error("sequence_sampling: empty group (merged)");
    }
    size_t pick = rs.uniform_below(rest.size());
    s[i0] = rest[pick];
    if (i0 + 1 < k) {
      // Tail positions accept any unchosen item: rebuild the pool as the
      // complement of the chosen prefix.
      std::fill(taken.begin(), taken.end(), 0);
      for (int j = 0; j <= i0; ++j) taken[s[j]] = 1;
      rest.clear();
      for (int64_t item = 0; item < d; ++item) {
        if (!taken[item]) rest.push_back(static_cast<int32_t>(item));
      }
      for (int j = i0 + 1; j < k; ++j) {
        s[j] = array_sampler_pop(rest, rs);
      }
    }
    local_steps += pool.appends() + static_cast<int64_t>(pool.expanded_buckets()) + 3 * d;
  }

  if (steps) *steps += local_steps;
  return s;
}

GroupId classify_sequence(const Histogram& h, const TopScores& t,
                          const Sequence& s, int64_t tau) {
  if (tau < 1) {
    throw std::invalid_argument("classify_sequence: tau must be >= 1");
  }
  int64_t loss = joint_loss(h, t, s);
  if (loss >= tau) {
    for (int j = 0; j < t.k(); ++j) {
      if (h.scores[s[j]] <= t.sorted[j] - tau) return GroupId{tau, j};
    }
  } else {
    for (int j = 0; j < t.k(); ++j) {
      if (h.scores[s[j]] == t.sorted[j] - loss) return GroupId{loss, j};
    }
  }
  throw std::logic_error("classify_sequence: no binding coordinate");
}

namespace {

Sequence select_impl(const Histogram& h, int k, double epsilon,
                     int64_t tau_requested, RandomSource& rs,
                     FastJointStats* stats) {
  validate_mechanism_args(h, k, epsilon);
  TopScores t = top_scores(h, k);
  int64_t tau = std::min(tau_requested, max_possible_loss(h, t) + 1);
  ValueIndex vi = build_value_index(h, t, tau);
  GroupIndex gi = build_group_index(h, t, vi, tau_requested);
  GroupId gid = subset_sampling(gi, epsilon, rs);
  int64_t seq_steps = 0;
  Sequence s = sequence_sampling(gid, h, t, vi, gi.tau, rs, &seq_steps);
  if (stats) {
    stats->tau_requested = tau_requested;
    stats->tau = gi.tau;
    stats->selected = gid;
    stats->steps = 2 * h.d() +
                   static_cast<int64_t>(vi.sorted_values.size()) + gi.steps +
                   static_cast<int64_t>(gi.log_size.size()) + seq_steps;
  }
  return s;
}

}  // namespace

Sequence fastjoint_select(const Histogram& h, const MechanismParams& params,
                          RandomSource& rs, FastJointStats* stats) {
  int64_t tau = compute_tau(h.d(), params.k, params.epsilon, params.beta);
  return select_impl(h, params.k, params.epsilon, tau, rs, stats);
}

Sequence fastjoint_select_with_tau(const Histogram& h, int k, double epsilon,
                                   int64_t tau, RandomSource& rs,
                                   FastJointStats* stats) {
  if (tau < 1) {
    throw std::invalid_argument("fastjoint_select_with_tau: tau must be >= 1");
  }
  return select_impl(h, k, epsilon, tau, rs, stats);
}

}  // namespace dptopk
