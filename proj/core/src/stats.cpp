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

#include "dptopk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace dptopk {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double chi_square_sf(double statistic, int dof) {
  if (dof < 1) {
    throw std::invalid_argument("chi_square_sf: dof must be >= 1");
  }
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

// Kolmogorov asymptotic survival function Q_KS(lambda).
double ks_sf(double lambda) {
  if (lambda < 1e-9) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 128; ++j) {
    double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-14 * std::abs(sum) || std::abs(term) < 1e-300) {
      break;
    }
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double log_sum_exp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) {
    if (std::isnan(v)) {
      throw std::invalid_argument("log_sum_exp: NaN entry");
    }
    m = std::max(m, v);
  }
  if (m == kNegInf) return kNegInf;
  double sum = 0.0;
  double comp = 0.0;
  for (double v : x) {
    if (v == kNegInf) continue;
    double term = std::exp(v - m) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return m + std::log(sum);
}

double chi_square_gof_pvalue(std::span<const int64_t> observed,
                             std::span<const double> expected_probs,
                             double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof_pvalue: size mismatch");
  }
  int64_t n = std::accumulate(observed.begin(), observed.end(), int64_t{0});
  if (n <= 0) {
    throw std::invalid_argument("chi_square_gof_pvalue: no observations");
  }
  std::vector<double> pooled_obs;
  std::vector<double> pooled_exp;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    obs_acc += static_cast<double>(observed[i]);
    exp_acc += static_cast<double>(n) * expected_probs[i];
    if (exp_acc >= min_expected) {
      pooled_obs.push_back(obs_acc);
      pooled_exp.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (pooled_obs.empty()) {
      throw std::invalid_argument(
          "chi_square_gof_pvalue: too few expected observations to test");
    }
    pooled_obs.back() += obs_acc;
    pooled_exp.back() += exp_acc;
  }
  if (pooled_obs.size() < 2) {
    throw std::invalid_argument(
        "chi_square_gof_pvalue: fewer than two cells after pooling");
  }
  double stat = 0.0;
  for (size_t i = 0; i < pooled_obs.size(); ++i) {
    double diff = pooled_obs[i] - pooled_exp[i];
    stat += diff * diff / pooled_exp[i];
  }
  return chi_square_sf(stat, static_cast<int>(pooled_obs.size()) - 1);
}

double chi_square_two_sample_pvalue(std::span<const int64_t> a,
                                    std::span<const int64_t> b,
                                    double min_combined) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("chi_square_two_sample_pvalue: size mismatch");
  }
  int64_t na = std::accumulate(a.begin(), a.end(), int64_t{0});
  int64_t nb = std::accumulate(b.begin(), b.end(), int64_t{0});
  if (na <= 0 || nb <= 0) {
    throw std::invalid_argument("chi_square_two_sample_pvalue: empty sample");
  }
  double ra = std::sqrt(static_cast<double>(nb) / static_cast<double>(na));
  double rb = 1.0 / ra;
  std::vector<std::pair<double, double>> cells;
  double acc_a = 0.0;
  double acc_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    acc_a += static_cast<double>(a[i]);
    acc_b += static_cast<double>(b[i]);
    if (acc_a + acc_b >= min_combined) {
      cells.emplace_back(acc_a, acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (cells.empty()) {
      throw std::invalid_argument(
          "chi_square_two_sample_pvalue: too few observations");
    }
    cells.back().first += acc_a;
    cells.back().second += acc_b;
  }
  if (cells.size() < 2) {
    throw std::invalid_argument(
        "chi_square_two_sample_pvalue: fewer than two cells after pooling");
  }
  double stat = 0.0;
  for (auto [oa, ob] : cells) {
    double diff = ra * oa - rb * ob;
    stat += diff * diff / (oa + ob);
  }
  return chi_square_sf(stat, static_cast<int>(cells.size()) - 1);
}

double ks_two_sample_pvalue(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("ks_two_sample_pvalue: empty sample");
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double nx = static_cast<double>(x.size());
  double ny = static_cast<double>(y.size());
  size_t ix = 0;
  size_t iy = 0;
  double d = 0.0;
  while (ix < x.size() && iy < y.size()) {
    double vx = x[ix];
    double vy = y[iy];
    if (vx <= vy) {
      while (ix < x.size() && x[ix] == vx) ++ix;
    }
    if (vy <= vx) {
      while (iy < y.size() && y[iy] == vy) ++iy;
    }
    d = std::max(d, std::abs(ix / nx - iy / ny));
  }
  double ne = std::sqrt(nx * ny / (nx + ny));
  return ks_sf((ne + 0.12 + 0.11 / ne) * d);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("tv_distance: support size mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    sum += std::abs(p[i] - q[i]);
  }
  return 0.5 * sum;
}

}  // namespace dptopk
