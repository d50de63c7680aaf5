// Copyright 2026 The aoplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOP_REPLAY_H_
#define AOP_REPLAY_H_

#include <array>
#include <cstddef>
#include <vector>

#include "aop/errors.h"
#include "aop/world.h"

namespace aop {

using ObsVec = std::array<double, kMaxObservationDim>;

// One (s, a, s', r) record, stored as observations.
struct Experience {
  ObsVec obs{};
  ActionVec action{};
  ObsVec next_obs{};
  double reward = 0.0;
};

// Capacity-bounded FIFO. Index 0 is the oldest surviving record.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
      throw Error(ErrorCode::kInvalidArgument, "RingBuffer: zero capacity");
    }
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void Push(const T& item) {
    if (items_.size() < capacity_) {
      items_.push_back(item);
    } else {
      items_[head_] = item;
      head_ = (head_ + 1) % capacity_;
    }
    ++total_pushed_;
  }

  const T& operator[](std::size_t i) const {
    return items_[(head_ + i) % items_.size()];
  }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  std::size_t total_pushed() const { return total_pushed_; }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t head_ = 0;  // oldest element once full
  std::size_t total_pushed_ = 0;
};

using ValueBuffer = RingBuffer<Experience>;
using PolicyBuffer = RingBuffer<Experience>;

}  // namespace aop

#endif  // AOP_REPLAY_H_
