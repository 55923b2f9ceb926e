// Copyright 2026 The mecbend Authors
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

// Seeded random streams. Uniform draws are (r >> 11) * 2^-53 on a 64-bit
// Mersenne Twister and every derived distribution is computed here, so the
// sequences do not depend on the standard library implementation.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mecbend {

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index)
      : eng_(mix(mix(seed ^ mix(tag)) ^ mix(index + 0x632be59bd9b4e019ULL))) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Exponential with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  int index(int n) {
    const int i = static_cast<int>(uniform() * n);
    return i < n ? i : n - 1;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mecbend
