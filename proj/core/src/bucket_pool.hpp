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

#ifndef DPTOPK_SRC_BUCKET_POOL_H_
#define DPTOPK_SRC_BUCKET_POOL_H_

#include <cstdint>
#include <vector>

#include "dptopk/histogram.hpp"
#include "dptopk/random.hpp"

namespace dptopk {
namespace internal {

// Incrementally expands value buckets (in decreasing value order) into a
// flat pool supporting O(1) uniform removal. Thresholds passed to
// expand_above must be non-increasing across calls.
class BucketPool {
 public:
  explicit BucketPool(const ValueIndex& vi) : vi_(vi) {}

  // Excluded item never enters the pool on later expansions.
  void set_skip(int32_t item) { skip_ = item; }

  // Appends all items of every not-yet-expanded bucket with value strictly
  // above `threshold`.
  void expand_above(int64_t threshold) {
    const auto& values = vi_.sorted_values;
    while (next_value_ < values.size() && values[next_value_] > threshold) {
      for (int32_t item : vi_.group(values[next_value_])) {
        if (item != skip_) pool_.push_back(item);
      }
      ++next_value_;
    }
  }

  bool empty() const { return pool_.empty(); }
  size_t size() const { return pool_.size(); }
  size_t expanded_buckets() const { return next_value_; }
  int64_t appends() const {
    return static_cast<int64_t>(pool_.size() + pops_);
  }

  int32_t pop_uniform(RandomSource& rs) {
    ++pops_;
    return array_sampler_pop(pool_, rs);
  }

  // Marks every item currently covered by an expanded bucket (including
  // items that were popped or skipped). `mark` must have size d.
  void mark_expanded(std::vector<char>& mark) const {
    for (size_t v = 0; v < next_value_; ++v) {
      for (int32_t item : vi_.group(vi_.sorted_values[v])) {
        mark[item] = 1;
      }
    }
  }

 private:
  const ValueIndex& vi_;
  std::vector<int32_t> pool_;
  size_t next_value_ = 0;
  int64_t pops_ = 0;
  int32_t skip_ = -1;
};

}  // namespace internal
}  // namespace dptopk

#endif  // DPTOPK_SRC_BUCKET_POOL_H_
