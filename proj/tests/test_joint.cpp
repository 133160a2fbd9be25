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

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <doctest.h>

#include "dptopk/fastjoint.hpp"
#include "dptopk/oracle.hpp"
#include "dptopk/stats.hpp"
#include "test_util.hpp"

namespace dptopk {
namespace {

TEST_SUITE_BEGIN("joint");

// Definitional recount of the walker counters: t[l] is the number of cells
// in row l whose key (loss, j - l*d) is lexicographically at or below the
// key of the cell just emitted.
std::vector<int64_t> recount(std::span<const int64_t> scores, int k,
                             const JointPairWalker::Pair& cur) {
  int64_t d = static_cast<int64_t>(scores.size());
  int64_t cur_tie = cur.j - static_cast<int64_t>(cur.i) * d;
  std::vector<int64_t> t(k, 0);
  for (int l = 1; l <= k; ++l) {
    for (int64_t j = 1; j <= d; ++j) {
      int64_t loss = scores[l - 1] - scores[j - 1];
      int64_t tie = j - static_cast<int64_t>(l) * d;
      if (loss < cur.loss || (loss == cur.loss && tie <= cur_tie)) {
        t[l - 1] += 1;
      }
    }
  }
  return t;
}

TEST_CASE("walker emits every cell once in increasing key order") {
  RandomSource rs(347);
  for (int trial = 0; trial < 30; ++trial) {
    int64_t d = 1 + rs.uniform_below(8);
    Histogram h = dptopk_test::random_histogram(rs, d, 4);
    int k = 1 + static_cast<int>(rs.uniform_below(d));
    JointPairWalker walker(h, k);
    std::set<std::pair<int, int64_t>> seen;
    JointPairWalker::Pair pair;
    bool have_prev = false;
    std::pair<int64_t, int64_t> prev_key;
    int64_t count = 0;
    while (walker.next(pair)) {
      ++count;
      CHECK(seen.insert({pair.i, pair.j}).second);
      std::pair<int64_t, int64_t> key{pair.loss,
                                      pair.j - static_cast<int64_t>(pair.i) * d};
      if (have_prev) CHECK(prev_key < key);
      prev_key = key;
      have_prev = true;
    }
    CHECK(count == d * k);
  }
}

TEST_CASE("counters match the definitional recount and closed forms") {
  RandomSource rs(349);
  for (int trial = 0; trial < 25; ++trial) {
    int64_t d = 2 + rs.uniform_below(6);
    Histogram h = dptopk_test::random_histogram(rs, d, 3);
    int k = 1 + static_cast<int>(rs.uniform_below(std::min<int64_t>(d, 4)));
    JointPairWalker walker(h, k);
    auto scores = walker.sorted_scores();
    JointPairWalker::Pair pair;
    while (walker.next(pair)) {
      std::vector<int64_t> expected = recount(scores, k, pair);
      auto got = walker.counters();
      REQUIRE(got.size() == static_cast<size_t>(k));
      for (int l = 0; l < k; ++l) CHECK(got[l] == expected[l]);

      // Closed forms: the emitted row sits exactly at its own column, rows
      // above count strictly-greater scores, rows below count at-or-above.
      CHECK(got[pair.i - 1] == pair.j);
      for (int l = 1; l <= k; ++l) {
        if (l == pair.i) continue;
        int64_t threshold = scores[l - 1] - pair.loss;
        int64_t expect = 0;
        for (int64_t p = 0; p < d; ++p) {
          if (l < pair.i ? scores[p] > threshold : scores[p] >= threshold) {
            ++expect;
          }
        }
        CHECK(got[l - 1] == expect);
      }
    }
  }
}

TEST_CASE("cell log-sizes match the counter product") {
  RandomSource rs(353);
  for (int trial = 0; trial < 25; ++trial) {
    int64_t d = 2 + rs.uniform_below(6);
    Histogram h = dptopk_test::random_histogram(rs, d, 3);
    int k = 1 + static_cast<int>(rs.uniform_below(std::min<int64_t>(d, 4)));
    JointPairWalker walker(h, k);
    JointPairWalker::Pair pair;
    while (walker.next(pair)) {
      auto t = walker.counters();
      double expected = 0.0;
      bool empty = false;
      for (int l = 1; l <= k; ++l) {
        if (l == pair.i) continue;
        int64_t term = t[l - 1] - (l - 1);
        if (term <= 0) {
          empty = true;
          break;
        }
        expected += std::log(static_cast<double>(term));
      }
      if (pair.j - (pair.i - 1) <= 0) empty = true;
      if (empty) {
        CHECK(pair.log_size == kLogZero);
      } else {
        REQUIRE(pair.log_size != kLogZero);
        CHECK(pair.log_size == doctest::Approx(expected).epsilon(1e-12));
        CHECK(pair.loss >= 0);
        CHECK(pair.j >= pair.i);
      }
    }
  }
}

TEST_CASE("cell sizes match brute-force enumeration") {
  RandomSource rs(359);
  for (int trial = 0; trial < 40; ++trial) {
    int64_t d = 2 + rs.uniform_below(5);
    Histogram h = dptopk_test::random_histogram(rs, d, 3);
    int k = 1 + static_cast<int>(rs.uniform_below(std::min<int64_t>(d, 3)));
    JointPairWalker walker(h, k);
    const auto& items = walker.sorted_items();
    auto scores = walker.sorted_scores();

    std::vector<int64_t> position(d);
    for (int64_t p = 0; p < d; ++p) position[items[p]] = p + 1;

    std::map<std::pair<int, int64_t>, int64_t> sizes;
    for (const Sequence& s : enumerate_sequences(d, k)) {
      int64_t best_loss = 0;
      int arg = 0;
      for (int m = 0; m < k; ++m) {
        int64_t loss = scores[m] - h.scores[s[m]];
        if (m == 0 || loss > best_loss) {
          best_loss = loss;
          arg = m;
        }
      }
      sizes[{arg + 1, position[s[arg]]}] += 1;
    }

    JointPairWalker::Pair pair;
    while (walker.next(pair)) {
      auto it = sizes.find({pair.i, pair.j});
      if (it == sizes.end()) {
        CHECK(pair.log_size == kLogZero);
      } else {
        REQUIRE(pair.log_size != kLogZero);
        CHECK(std::abs(pair.log_size -
                       std::log(static_cast<double>(it->second))) < 1e-9);
      }
    }
  }
}

TEST_CASE("cell log-sizes sum to the number of candidate sequences") {
  RandomSource rs(367);
  Histogram h = dptopk_test::random_histogram(rs, 200, 40);
  int k = 5;
  JointPairWalker walker(h, k);
  std::vector<double> logs;
  JointPairWalker::Pair pair;
  while (walker.next(pair)) logs.push_back(pair.log_size);
  CHECK(logs.size() == 200u * 5u);
  double expected = std::lgamma(201.0) - std::lgamma(196.0);
  CHECK(std::abs(log_sum_exp(logs) - expected) <= 1e-9 * expected);
}

TEST_CASE("sorted positions break score ties by item id") {
  Histogram h = build_histogram({1, 3, 3, 0, 3});
  JointPairWalker walker(h, 2);
  const auto& items = walker.sorted_items();
  CHECK(items == std::vector<int32_t>{1, 2, 4, 0, 3});
  auto scores = walker.sorted_scores();
  CHECK(std::vector<int64_t>(scores.begin(), scores.end()) ==
        std::vector<int64_t>{3, 3, 3, 1, 0});
}

TEST_CASE("walker rejects invalid k") {
  Histogram h = build_histogram({1, 2});
  CHECK_THROWS_AS(JointPairWalker(h, 0), std::invalid_argument);
  CHECK_THROWS_AS(JointPairWalker(h, 3), std::invalid_argument);
}

TEST_CASE("joint_select matches the untruncated oracle distribution") {
  RandomSource gen(373);
  Histogram h = dptopk_test::random_histogram(gen, 4, 3);
  int k = 2;
  double epsilon = 1.0;
  ExactDistribution oracle = exact_mechanism_distribution(h, k, epsilon, 0);
  RandomSource rs(379);
  auto counts = dptopk_test::sample_counts(
      oracle, 200000, [&] { return joint_select(h, k, epsilon, rs); });
  CHECK(tv_distance(dptopk_test::frequencies(counts), oracle.masses) < 0.02);
  CHECK(chi_square_gof_pvalue(counts, oracle.masses) > 0.001);
}

TEST_CASE("joint_select with k=1 is the exponential mechanism over items") {
  Histogram h = build_histogram({4, 2, 2, 0, 4});
  double epsilon = 1.3;
  std::vector<double> weights(h.d());
  for (int64_t i = 0; i < h.d(); ++i) {
    weights[i] = std::exp(-0.5 * epsilon * static_cast<double>(4 - h.scores[i]));
  }
  double z = 0.0;
  for (double w : weights) z += w;
  std::vector<double> expected;
  for (double w : weights) expected.push_back(w / z);

  RandomSource rs(383);
  std::vector<int64_t> counts(h.d(), 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Sequence s = joint_select(h, 1, epsilon, rs);
    REQUIRE(s.size() == 1);
    counts[s[0]] += 1;
  }
  CHECK(chi_square_gof_pvalue(counts, expected) > 0.001);
}

TEST_CASE("all-equal histogram yields a uniform sequence distribution") {
  Histogram h = build_histogram({1, 1, 1, 1});
  ExactDistribution oracle = exact_mechanism_distribution(h, 2, 1.0, 0);
  RandomSource rs(389);
  auto counts = dptopk_test::sample_counts(
      oracle, 100000, [&] { return joint_select(h, 2, 1.0, rs); });
  CHECK(tv_distance(dptopk_test::frequencies(counts), oracle.masses) < 0.015);
  CHECK(chi_square_gof_pvalue(counts, oracle.masses) > 0.001);
}

TEST_CASE("joint and fastjoint with maximal tau draw from the same law") {
  RandomSource gen(397);
  Histogram h = dptopk_test::random_histogram(gen, 5, 3);
  int k = 2;
  double epsilon = 0.7;
  ExactDistribution oracle = exact_mechanism_distribution(h, k, epsilon, 0);

  RandomSource rs_a(401);
  auto a = dptopk_test::sample_counts(
      oracle, 60000, [&] { return joint_select(h, k, epsilon, rs_a); });
  RandomSource rs_b(409);
  auto b = dptopk_test::sample_counts(oracle, 60000, [&] {
    return fastjoint_select_with_tau(h, k, epsilon, 1000000, rs_b);
  });
  CHECK(chi_square_two_sample_pvalue(a, b) > 0.001);
}

TEST_CASE("selected sequences have distinct in-range items") {
  RandomSource rs(419);
  for (int trial = 0; trial < 60; ++trial) {
    int64_t d = 2 + rs.uniform_below(30);
    Histogram h = dptopk_test::random_histogram(rs, d, 10);
    int k = 1 + static_cast<int>(rs.uniform_below(std::min<int64_t>(d, 6)));
    Sequence s = joint_select(h, k, 1.0, rs);
    REQUIRE(s.size() == static_cast<size_t>(k));
    std::set<int32_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == s.size());
    for (int32_t item : s) {
      CHECK(item >= 0);
      CHECK(item < d);
    }
  }
}

TEST_SUITE_END();

}  // namespace
}  // namespace dptopk
