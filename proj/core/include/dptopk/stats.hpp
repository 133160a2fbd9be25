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

#ifndef DPTOPK_STATS_H_
#define DPTOPK_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace dptopk {

// log(sum_i exp(x_i)) computed stably. Entries equal to -infinity are
// treated as zero mass; returns -infinity when all entries are.
double log_sum_exp(std::span<const double> x);

// Pearson goodness-of-fit p-value of observed counts against expected cell
// probabilities. Cells are pooled left to right until each pooled cell has
// expected count >= min_expected. Requires at least two pooled cells.
double chi_square_gof_pvalue(std::span<const int64_t> observed,
                             std::span<const double> expected_probs,
                             double min_expected = 5.0);

// Two-sample chi-square p-value for count vectors over a common support.
// Cells are pooled until each pooled cell has a + b >= min_combined.
double chi_square_two_sample_pvalue(std::span<const int64_t> a,
                                    std::span<const int64_t> b,
                                    double min_combined = 10.0);

// Two-sample Kolmogorov-Smirnov p-value (asymptotic), for real-valued
// samples. Requires both samples non-empty.
double ks_two_sample_pvalue(std::vector<double> x, std::vector<double> y);

// Total variation distance between two distributions given as probability
// vectors over the same support. Requires equal lengths.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace dptopk

#endif  // DPTOPK_STATS_H_
