// Copyright 2026 The scoreaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCOREAUDIT_RNG_H_
#define SCOREAUDIT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace scoreaudit {

// Hashes a tuple of integers into a 64-bit stream key, e.g. (seed, replicate)
// or (seed, i, j).
std::uint64_t StreamKey(std::initializer_list<std::uint64_t> parts);

// SplitMix64 stream with portable uniform, normal and bounded draws.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double NextUniform();
  // Standard normal via Box-Muller.
  double NextNormal();
  // Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t NextBelow(std::uint64_t bound);

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates.
template <typename T>
void Shuffle(std::span<T> values, CounterRng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.NextBelow(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace scoreaudit

#endif  // SCOREAUDIT_RNG_H_
