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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dptopk/bench.hpp"
#include "dptopk/fastjoint.hpp"
#include "dptopk/histogram.hpp"
#include "dptopk/joint.hpp"
#include "dptopk/oracle.hpp"
#include "dptopk/peel.hpp"
#include "dptopk/random.hpp"
#include "dptopk/stats.hpp"

namespace {

constexpr double kDefaultBeta = 0.0009765625;  // 2^-10

struct SelectArgs {
  std::string mechanism = "fastjoint";
  std::string dataset;
  int k = 100;
  double epsilon = 1.0;
  double beta = kDefaultBeta;
  double delta = 1e-6;
  uint64_t seed = 1;
};

int run_select(const SelectArgs& args) {
  dptopk::Histogram h = dptopk::load_dataset(args.dataset);
  dptopk::RandomSource rs(args.seed);
  dptopk::Sequence s;
  auto start = std::chrono::steady_clock::now();
  if (args.mechanism == "fastjoint") {
    s = dptopk::fastjoint_select(
        h, dptopk::MechanismParams{args.k, args.epsilon, args.beta}, rs);
  } else if (args.mechanism == "joint") {
    s = dptopk::joint_select(h, args.k, args.epsilon, rs);
  } else if (args.mechanism == "cdp-peel") {
    s = dptopk::cdp_peel_select(h, args.k, args.epsilon, args.delta, rs);
  } else if (args.mechanism == "pnf-peel") {
    s = dptopk::pnf_peel_select(h, args.k, args.epsilon, rs);
  } else {
    std::cerr << "unknown mechanism '" << args.mechanism << "'\n";
    return 2;
  }
  auto stop = std::chrono::steady_clock::now();

  for (size_t j = 0; j < s.size(); ++j) {
    std::cout << (j ? " " : "") << s[j];
  }
  std::cout << "\n";
  dptopk::TopScores t = dptopk::top_scores(h, args.k);
  std::cout << "linf_error=" << dptopk::linf_error(h, t, s)
            << " l1_error=" << dptopk::l1_error(h, t, s) << " wall_time="
            << std::chrono::duration<double>(stop - start).count() << "\n";
  return 0;
}

struct BenchArgs {
  std::string mechanism = "fastjoint";
  std::string dataset;
  std::string vary = "k";
  int k = 100;
  double epsilon = 1.0;
  double beta = kDefaultBeta;
  double delta = 1e-6;
  int reps = 200;
  uint64_t seed = 1;
  std::string out = "-";
  std::string format = "csv";
};

int run_bench(const BenchArgs& args) {
  dptopk::ExperimentConfig cfg;
  cfg.mechanism = args.mechanism;
  cfg.dataset_path = args.dataset;
  cfg.k_values = {args.k};
  cfg.epsilon_values = {args.epsilon};
  cfg.beta_values = {args.beta};
  cfg.delta = args.delta;
  cfg.repetitions = args.reps;
  cfg.seed = args.seed;
  cfg.threads = dptopk::threads_from_env();
  if (args.vary == "k") {
    cfg.k_values = dptopk::default_k_grid();
  } else if (args.vary == "epsilon") {
    cfg.epsilon_values = dptopk::default_epsilon_grid();
  } else if (args.vary == "beta") {
    cfg.beta_values = dptopk::default_beta_grid();
  } else {
    std::cerr << "--vary must be one of k, epsilon, beta\n";
    return 2;
  }
  dptopk::ExperimentResult result = dptopk::run_experiment(cfg);
  for (const std::string& note : result.skipped) {
    std::cerr << "skipped: " << note << "\n";
  }
  dptopk::write_results(dptopk::aggregate(result.records), args.format,
                        args.out);
  return 0;
}

struct GapsArgs {
  std::string dataset;
  int top = 100;
  std::string out = "-";
};

int run_gaps(const GapsArgs& args) {
  dptopk::Histogram h = dptopk::load_dataset(args.dataset);
  std::vector<int64_t> gaps = dptopk::gap_report(h, args.top);
  std::string payload = "index,gap\n";
  for (size_t i = 0; i < gaps.size(); ++i) {
    payload += std::to_string(i) + "," + std::to_string(gaps[i]) + "\n";
  }
  if (args.out.empty() || args.out == "-") {
    std::cout << payload;
  } else {
    std::ofstream f(args.out);
    if (!f) {
      std::cerr << "cannot open '" << args.out << "'\n";
      return 1;
    }
    f << payload;
  }
  return 0;
}

bool check(bool ok, const std::string& name, int& failures) {
  if (ok) {
    std::cout << "ok: " << name << "\n";
  } else {
    std::cout << "FAIL: " << name << "\n";
    ++failures;
  }
  return ok;
}

// Quick self-test: sampled mechanism distributions against the brute-force
// oracle, the privacy budget arithmetic, and the results round-trip.
int run_verify(uint64_t seed) {
  using namespace dptopk;
  int failures = 0;

  Histogram h = build_histogram({4, 2, 1, 0});
  int k = 2;
  double epsilon = 1.0;
  int samples = 50000;

  {
    ExactDistribution oracle = exact_mechanism_distribution(
        h, k, epsilon, compute_tau(h.d(), k, epsilon, kDefaultBeta));
    std::vector<int64_t> counts(oracle.support.size(), 0);
    RandomSource rs(seed);
    for (int i = 0; i < samples; ++i) {
      counts[oracle.index_of(fastjoint_select(
          h, MechanismParams{k, epsilon, kDefaultBeta}, rs))] += 1;
    }
    std::vector<double> freq(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
      freq[i] = static_cast<double>(counts[i]) / samples;
    }
    check(tv_distance(freq, oracle.masses) < 0.03, "fastjoint matches oracle",
          failures);
  }
  {
    ExactDistribution oracle = exact_mechanism_distribution(h, k, epsilon);
    std::vector<int64_t> counts(oracle.support.size(), 0);
    RandomSource rs(seed + 1);
    for (int i = 0; i < samples; ++i) {
      counts[oracle.index_of(joint_select(h, k, epsilon, rs))] += 1;
    }
    std::vector<double> freq(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
      freq[i] = static_cast<double>(counts[i]) / samples;
    }
    check(tv_distance(freq, oracle.masses) < 0.03, "joint matches oracle",
          failures);
  }
  {
    Histogram base = build_histogram({2, 1});
    double worst = 0.0;
    for (const Histogram& nb : neighboring_histograms(base)) {
      for (int64_t tau : {int64_t{1}, int64_t{2}}) {
        worst = std::max(worst,
                         privacy_ratio(base, nb, 1, epsilon, tau, true));
      }
    }
    check(worst <= epsilon + 1e-9, "privacy ratio within budget", failures);
  }
  {
    double eps0 = cdp_peel_round_epsilon(10, 1.0, 1e-6);
    double rho = 10.0 * eps0 * eps0 / 8.0;
    double spent = rho + 2.0 * std::sqrt(rho * std::log(1e6));
    check(eps0 > 0 && spent <= 1.0 + 1e-9, "cdp budget conversion", failures);
  }
  {
    RandomSource rs(seed + 2);
    Sequence s = cdp_peel_select(h, k, 1e6, 1e-6, rs);
    Sequence p = pnf_peel_select(h, k, 1e6, rs);
    check(s == Sequence({0, 1}) && p == Sequence({0, 1}),
          "peeling baselines find the top-k at huge epsilon", failures);
  }
  {
    std::vector<AggregateRecord> rows(1);
    rows[0] = {"fastjoint", 10, 0.25, kDefaultBeta, 0.0, "l1_error",
               1.0,         2.0, 3.0};
    bool ok = results_from_csv(results_to_csv(rows)) == rows &&
              results_from_json(results_to_json(rows)) == rows;
    check(ok, "results round-trip", failures);
  }

  if (failures == 0) {
    std::cout << "verify: all checks passed\n";
    return 0;
  }
  std::cout << "verify: " << failures << " check(s) failed\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private top-k selection benchmark"};
  app.require_subcommand(1);

  SelectArgs select_args;
  CLI::App* select = app.add_subcommand("select", "Run one mechanism draw");
  select->add_option("--mechanism", select_args.mechanism,
                     "fastjoint | joint | cdp-peel | pnf-peel");
  select->add_option("--dataset", select_args.dataset, "score file")
      ->required();
  select->add_option("--k", select_args.k, "sequence length");
  select->add_option("--epsilon", select_args.epsilon, "privacy budget");
  select->add_option("--beta", select_args.beta, "truncation failure mass");
  select->add_option("--delta", select_args.delta, "cdp-peel delta");
  select->add_option("--seed", select_args.seed, "random seed");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run a parameter sweep");
  bench->add_option("--mechanism", bench_args.mechanism,
                    "fastjoint | joint | cdp-peel | pnf-peel");
  bench->add_option("--dataset", bench_args.dataset, "score file")
      ->required();
  bench->add_option("--vary", bench_args.vary, "k | epsilon | beta");
  bench->add_option("--k", bench_args.k, "fixed k when not varied");
  bench->add_option("--epsilon", bench_args.epsilon,
                    "fixed epsilon when not varied");
  bench->add_option("--beta", bench_args.beta, "fixed beta when not varied");
  bench->add_option("--delta", bench_args.delta, "cdp-peel delta");
  bench->add_option("--reps", bench_args.reps, "repetitions per grid point");
  bench->add_option("--seed", bench_args.seed, "random seed");
  bench->add_option("--out", bench_args.out, "output path, - for stdout");
  bench->add_option("--format", bench_args.format, "csv | json");

  uint64_t verify_seed = 7;
  CLI::App* verify = app.add_subcommand("verify", "Run quick self-checks");
  verify->add_option("--seed", verify_seed, "random seed");

  GapsArgs gaps_args;
  CLI::App* gaps = app.add_subcommand("gaps", "Top-score gap report");
  gaps->add_option("--dataset", gaps_args.dataset, "score file")->required();
  gaps->add_option("--top", gaps_args.top, "number of top scores");
  gaps->add_option("--out", gaps_args.out, "output path, - for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (select->parsed()) return run_select(select_args);
    if (bench->parsed()) return run_bench(bench_args);
    if (verify->parsed()) return run_verify(verify_seed);
    if (gaps->parsed()) return run_gaps(gaps_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
