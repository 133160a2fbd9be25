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

#include "dptopk/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dptopk/fastjoint.hpp"
#include "dptopk/joint.hpp"
#include "dptopk/peel.hpp"
#include "dptopk/random.hpp"

namespace dptopk {
namespace {

bool known_mechanism(const std::string& name) {
  for (const char* m : kMechanismNames) {
    if (name == m) return true;
  }
  return false;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* field) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("results_from_csv: bad ") + field +
                                " value '" + s + "'");
  }
}

// Nearest-rank percentile of a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
  size_t n = sorted.size();
  size_t rank = static_cast<size_t>(
      std::ceil(p / 100.0 * static_cast<double>(n) - 1e-9));
  if (rank < 1) rank = 1;
  return sorted[rank - 1];
}

struct GridPoint {
  int k;
  double epsilon;
  double beta;
};

}  // namespace

Histogram load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open '" + path + "'");
  }
  std::vector<int64_t> scores;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t\r");
    std::string_view body(line.data() + begin, end - begin + 1);
    if (body[0] == '#') continue;
    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(),
                                     value);
    if (ec != std::errc() || ptr != body.data() + body.size()) {
      throw std::runtime_error("load_dataset: " + path + ":" +
                               std::to_string(line_no) +
                               ": not a valid integer score");
    }
    if (value < 0) {
      throw std::runtime_error("load_dataset: " + path + ":" +
                               std::to_string(line_no) + ": negative score");
    }
    scores.push_back(value);
  }
  if (scores.empty()) {
    throw std::runtime_error("load_dataset: " + path + ": no scores found");
  }
  return build_histogram(std::move(scores));
}

int64_t linf_error(const Histogram& h, const TopScores& t, const Sequence& s) {
  if (static_cast<int>(s.size()) != t.k()) {
    throw std::invalid_argument("linf_error: sequence length != k");
  }
  int64_t worst = 0;
  for (size_t j = 0; j < s.size(); ++j) {
    worst = std::max(worst, std::abs(t.sorted[j] - h.scores[s[j]]));
  }
  return worst;
}

int64_t l1_error(const Histogram& h, const TopScores& t, const Sequence& s) {
  if (static_cast<int>(s.size()) != t.k()) {
    throw std::invalid_argument("l1_error: sequence length != k");
  }
  int64_t total = 0;
  for (size_t j = 0; j < s.size(); ++j) {
    total += std::abs(t.sorted[j] - h.scores[s[j]]);
  }
  return total;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!known_mechanism(cfg.mechanism)) {
    throw std::invalid_argument("run_experiment: unknown mechanism '" +
                                cfg.mechanism + "'");
  }
  if (cfg.repetitions < 1) {
    throw std::invalid_argument("run_experiment: repetitions must be >= 1");
  }
  int varying = (cfg.k_values.size() > 1) + (cfg.epsilon_values.size() > 1) +
                (cfg.beta_values.size() > 1);
  if (varying > 1) {
    throw std::invalid_argument(
        "run_experiment: only one of k/epsilon/beta may vary per sweep");
  }
  if (cfg.k_values.empty() || cfg.epsilon_values.empty() ||
      cfg.beta_values.empty()) {
    throw std::invalid_argument("run_experiment: empty parameter list");
  }

  Histogram h = load_dataset(cfg.dataset_path);
  RandomSource root(cfg.seed);

  ExperimentResult result;
  std::vector<GridPoint> grid;
  for (int k : cfg.k_values) {
    for (double eps : cfg.epsilon_values) {
      for (double beta : cfg.beta_values) {
        if (k < 1 || k > h.d()) {
          result.skipped.push_back("k=" + std::to_string(k) +
                                   " outside [1, d]; grid point skipped");
          continue;
        }
        grid.push_back(GridPoint{k, eps, beta});
      }
    }
  }

  int threads = std::max(1, cfg.threads);
  for (size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& pt = grid[g];
    TopScores t = top_scores(h, pt.k);
    bool uses_delta = cfg.mechanism == "cdp-peel";

    std::vector<ExperimentRecord> slot(cfg.repetitions);
    auto run_range = [&](int lo, int hi) {
      for (int rep = lo; rep < hi; ++rep) {
        RandomSource rs = root.derive(static_cast<uint64_t>(g),
                                      static_cast<uint64_t>(rep));
        Sequence s;
        auto start = std::chrono::steady_clock::now();
        if (cfg.mechanism == "fastjoint") {
          s = fastjoint_select(h, MechanismParams{pt.k, pt.epsilon, pt.beta},
                               rs);
        } else if (cfg.mechanism == "joint") {
          s = joint_select(h, pt.k, pt.epsilon, rs);
        } else if (cfg.mechanism == "cdp-peel") {
          s = cdp_peel_select(h, pt.k, pt.epsilon, cfg.delta, rs);
        } else {
          s = pnf_peel_select(h, pt.k, pt.epsilon, rs);
        }
        auto stop = std::chrono::steady_clock::now();
        ExperimentRecord& rec = slot[rep];
        rec.mechanism = cfg.mechanism;
        rec.k = pt.k;
        rec.epsilon = pt.epsilon;
        rec.beta = pt.beta;
        rec.delta = uses_delta ? cfg.delta : 0.0;
        rec.repetition = rep;
        rec.wall_time = std::chrono::duration<double>(stop - start).count();
        rec.linf_error = linf_error(h, t, s);
        rec.l1_error = l1_error(h, t, s);
      }
    };

    if (threads == 1 || cfg.repetitions == 1) {
      run_range(0, cfg.repetitions);
    } else {
      int workers = std::min(threads, cfg.repetitions);
      std::vector<std::thread> pool;
      std::exception_ptr failure;
      std::mutex failure_mu;
      int chunk = (cfg.repetitions + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        int lo = w * chunk;
        int hi = std::min(cfg.repetitions, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          try {
            run_range(lo, hi);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (failure) std::rethrow_exception(failure);
    }
    for (auto& rec : slot) result.records.push_back(std::move(rec));
  }
  return result;
}

std::vector<AggregateRecord> aggregate(
    const std::vector<ExperimentRecord>& records) {
  struct Key {
    std::string mechanism;
    int k;
    double epsilon;
    double beta;
    double delta;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> order;
  std::vector<std::array<std::vector<double>, 3>> values;
  for (const auto& rec : records) {
    Key key{rec.mechanism, rec.k, rec.epsilon, rec.beta, rec.delta};
    size_t idx = 0;
    for (; idx < order.size(); ++idx) {
      if (order[idx] == key) break;
    }
    if (idx == order.size()) {
      order.push_back(key);
      values.emplace_back();
    }
    values[idx][0].push_back(rec.wall_time);
    values[idx][1].push_back(static_cast<double>(rec.linf_error));
    values[idx][2].push_back(static_cast<double>(rec.l1_error));
  }
  static const char* kMetrics[3] = {"wall_time", "linf_error", "l1_error"};
  std::vector<AggregateRecord> out;
  for (size_t i = 0; i < order.size(); ++i) {
    for (int m = 0; m < 3; ++m) {
      std::vector<double>& v = values[i][m];
      std::sort(v.begin(), v.end());
      AggregateRecord row;
      row.mechanism = order[i].mechanism;
      row.k = order[i].k;
      row.epsilon = order[i].epsilon;
      row.beta = order[i].beta;
      row.delta = order[i].delta;
      row.metric = kMetrics[m];
      row.p25 = percentile(v, 25.0);
      row.median = percentile(v, 50.0);
      row.p75 = percentile(v, 75.0);
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<int64_t> gap_report(const Histogram& h, int m) {
  TopScores t = top_scores(h, m);  // validates m
  std::vector<int64_t> gaps;
  gaps.reserve(m > 0 ? m - 1 : 0);
  for (int i = 0; i + 1 < m; ++i) {
    gaps.push_back(t.sorted[i] - t.sorted[i + 1]);
  }
  return gaps;
}

std::string results_to_csv(const std::vector<AggregateRecord>& rows) {
  std::string out = "mechanism,k,epsilon,beta,delta,metric,p25,median,p75\n";
  for (const auto& r : rows) {
    out += r.mechanism;
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += format_double(r.epsilon);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.delta);
    out += ',';
    out += r.metric;
    out += ',';
    out += format_double(r.p25);
    out += ',';
    out += format_double(r.median);
    out += ',';
    out += format_double(r.p75);
    out += '\n';
  }
  return out;
}

std::vector<AggregateRecord> results_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("results_from_csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "mechanism,k,epsilon,beta,delta,metric,p25,median,p75") {
    throw std::invalid_argument("results_from_csv: unexpected header '" +
                                line + "'");
  }
  std::vector<AggregateRecord> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 9) {
      throw std::invalid_argument("results_from_csv: expected 9 fields, got " +
                                  std::to_string(fields.size()));
    }
    AggregateRecord r;
    r.mechanism = fields[0];
    r.k = static_cast<int>(parse_double(fields[1], "k"));
    r.epsilon = parse_double(fields[2], "epsilon");
    r.beta = parse_double(fields[3], "beta");
    r.delta = parse_double(fields[4], "delta");
    r.metric = fields[5];
    r.p25 = parse_double(fields[6], "p25");
    r.median = parse_double(fields[7], "median");
    r.p75 = parse_double(fields[8], "p75");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string results_to_json(const std::vector<AggregateRecord>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"mechanism", r.mechanism},
                   {"k", r.k},
                   {"epsilon", r.epsilon},
                   {"beta", r.beta},
                   {"delta", r.delta},
                   {"metric", r.metric},
                   {"p25", r.p25},
                   {"median", r.median},
                   {"p75", r.p75}});
  }
  return arr.dump(2) + "\n";
}

std::vector<AggregateRecord> results_from_json(const std::string& json) {
  nlohmann::json arr = nlohmann::json::parse(json);
  if (!arr.is_array()) {
    throw std::invalid_argument("results_from_json: expected an array");
  }
  std::vector<AggregateRecord> rows;
  for (const auto& item : arr) {
    AggregateRecord r;
    r.mechanism = item.at("mechanism").get<std::string>();
    r.k = item.at("k").get<int>();
    r.epsilon = item.at("epsilon").get<double>();
    r.beta = item.at("beta").get<double>();
    r.delta = item.at("delta").get<double>();
    r.metric = item.at("metric").get<std::string>();
    r.p25 = item.at("p25").get<double>();
    r.median = item.at("median").get<double>();
    r.p75 = item.at("p75").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_results(const std::vector<AggregateRecord>& rows,
                   const std::string& format, const std::string& path) {
  std::string payload;
  if (format == "csv") {
    payload = results_to_csv(rows);
  } else if (format == "json") {
    payload = results_to_json(rows);
  } else {
    throw std::invalid_argument("write_results: format must be csv or json");
  }
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_results: cannot open '" + path + "'");
  }
  out << payload;
  if (!out) {
    throw std::runtime_error("write_results: short write to '" + path + "'");
  }
}

int threads_from_env() {
  const char* raw = std::getenv("DPTOPK_THREADS");
  if (!raw) return 1;
  int value = 0;
  auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), value);
  if (ec != std::errc() || *ptr != '\0' || value < 1) return 1;
  return std::min(value, 256);
}

std::vector<int> default_k_grid() {
  std::vector<int> ks;
  for (int k = 10; k <= 200; k += 10) ks.push_back(k);
  return ks;
}

std::vector<double> default_epsilon_grid() { return {0.25, 0.5, 1.0, 2.0, 4.0}; }

std::vector<double> default_beta_grid() {
  return {0.015625, 0.00390625, 0.0009765625, 0.000244140625,
          0.00006103515625};
}

}  // namespace dptopk
