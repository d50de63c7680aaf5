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

#ifndef AOP_RNG_H_
#define AOP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace aop {

inline constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a list of counters into one stream key. Order matters.
inline constexpr std::uint64_t DeriveKey(
    std::initializer_list<std::uint64_t> parts) {
  std::uint64_t key = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) key = SplitMix64(key ^ SplitMix64(p));
  return key;
}

// Counter-based generator: the n-th output is a pure function of (key, n),
// so a stream can be re-created anywhere without carrying engine state.
// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::initializer_list<std::uint64_t> parts)
      : key_(DeriveKey(parts)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return SplitMix64(key_ ^ SplitMix64(counter_++)); }

  // uniform in [0, 1)
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aop

#endif  // AOP_RNG_H_
