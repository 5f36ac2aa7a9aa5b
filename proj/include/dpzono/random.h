// Copyright 2026 The dpzono Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPZONO_RANDOM_H_
#define DPZONO_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpzono {

// Seeded random stream with a platform-independent uniform draw.
//
// std::uniform_real_distribution is implementation-defined, so uniforms are
// built directly from the top 53 bits of the 64-bit Mersenne Twister output.
// Two streams constructed from the same seed produce bit-identical sequences
// on every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  // Independent stream for Monte-Carlo run `index`. The child seed is
  // SplitMix64(seed XOR index), so run streams never share a state sequence
  // with their parent or with each other for distinct indices.
  static RandomStream Substream(uint64_t seed, uint64_t index) {
    return RandomStream(SplitMix64(seed ^ index));
  }

  // Uniform in [0, 1).
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  uint64_t NextU64() { return engine_(); }

  static uint64_t SplitMix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpzono

#endif  // DPZONO_RANDOM_H_
