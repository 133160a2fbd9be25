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

#ifndef DPTOPK_PEEL_H_
#define DPTOPK_PEEL_H_

#include <cstdint>

#include "dptopk/histogram.hpp"
#include "dptopk/random.hpp"

namespace dptopk {

// Largest per-round budget eps0 whose k-fold zCDP composition converts
// back to (epsilon, delta)-DP:
//
//   k * eps0^2 / 8 + 2 * sqrt((k * eps0^2 / 8) * ln(1/delta)) <= epsilon.
//
// Found by bisection; the returned value satisfies the inequality.
double cdp_peel_round_epsilon(int k, double epsilon, double delta);

// Peeling exponential mechanism under zCDP composition. Equivalent to k
// sequential eps0-DP exponential-mechanism rounds, realized in one shot:
// add Gumbel(2/eps0) noise to every score and take the k noisiest items
// in decreasing noisy order.
Sequence cdp_peel_select(const Histogram& h, int k, double epsilon,
                         double delta, RandomSource& rs);

// Permute-and-flip peeling under pure-DP composition: k rounds, each
// adding fresh Exp(2k/epsilon) noise to every unselected score and taking
// the noisy argmax (Exp(k/epsilon) when `monotone`, which treats the
// add-one neighbor direction as monotone).
Sequence pnf_peel_select(const Histogram& h, int k, double epsilon,
                         RandomSource& rs, bool monotone = false);

}  // namespace dptopk

#endif  // DPTOPK_PEEL_H_
