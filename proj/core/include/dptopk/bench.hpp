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

#ifndef DPTOPK_BENCH_H_
#define DPTOPK_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dptopk/histogram.hpp"

namespace dptopk {

inline constexpr const char* kMechanismNames[] = {"fastjoint", "joint",
                                                  "cdp-peel", "pnf-peel"};

// One benchmark sweep. Exactly one of the three parameter lists may hold
// more than one value; the others act as fixed settings.
struct ExperimentConfig {
  std::string mechanism = "fastjoint";
  std::string dataset_path;
  std::vector<int> k_values = {100};
  std::vector<double> epsilon_values = {1.0};
  std::vector<double> beta_values = {0.0009765625};  // 2^-10
  double delta = 1e-6;
  int repetitions = 200;
  uint64_t seed = 1;
  int threads = 1;
};

// One mechanism invocation. delta is recorded as 0 for mechanisms that do
// not consume it.
struct ExperimentRecord {
  std::string mechanism;
  int k = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  int repetition = 0;
  double wall_time = 0.0;  // seconds
  int64_t linf_error = 0;
  int64_t l1_error = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::vector<std::string> skipped;  // human-readable grid points not run
};

// Quartiles of one metric at one grid point.
struct AggregateRecord {
  std::string mechanism;
  int k = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::string metric;  // wall_time | linf_error | l1_error
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;

  bool operator==(const AggregateRecord&) const = default;
};

// Reads one non-negative integer score per line. Blank lines and lines
// starting with '#' are skipped. Parse failures report the line number.
Histogram load_dataset(const std::string& path);

// max_j |t.sorted[j] - h.scores[s[j]]| and the corresponding sum.
int64_t linf_error(const Histogram& h, const TopScores& t, const Sequence& s);
int64_t l1_error(const Histogram& h, const TopScores& t, const Sequence& s);

// Runs mechanism repetitions over the parameter grid. Repetition (g, i) of
// grid point g always uses the random stream derived from (seed, g, i), so
// results are identical for any thread count. Grid points with k > d are
// skipped and reported.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Nearest-rank quartiles per grid point, three rows per point (wall_time,
// linf_error, l1_error), grid points in first-appearance order.
std::vector<AggregateRecord> aggregate(
    const std::vector<ExperimentRecord>& records);

// Score gaps t.sorted[i] - t.sorted[i+1] for i in [0, m-1), from the top m
// scores. Requires 1 <= m <= d.
std::vector<int64_t> gap_report(const Histogram& h, int m);

// CSV with header mechanism,k,epsilon,beta,delta,metric,p25,median,p75.
// Doubles are written round-trip exact; parse(serialize(x)) == x.
std::string results_to_csv(const std::vector<AggregateRecord>& rows);
std::vector<AggregateRecord> results_from_csv(const std::string& csv);

std::string results_to_json(const std::vector<AggregateRecord>& rows);
std::vector<AggregateRecord> results_from_json(const std::string& json);

// format is "csv" or "json"; path "-" writes to stdout.
void write_results(const std::vector<AggregateRecord>& rows,
                   const std::string& format, const std::string& path);

// Worker count from DPTOPK_THREADS, clamped to [1, 256]; 1 when unset or
// unparsable.
int threads_from_env();

// Sweep grids used by the CLI: k in 10..200 step 10, epsilon in
// {1/4, 1/2, 1, 2, 4}, beta in {2^-6, 2^-8, 2^-10, 2^-12, 2^-14}.
std::vector<int> default_k_grid();
std::vector<double> default_epsilon_grid();
std::vector<double> default_beta_grid();

}  // namespace dptopk

#endif  // DPTOPK_BENCH_H_
