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

// Unit conversions between the file-level units and the canonical internal
// unit system.
//
// Canonical units used everywhere inside the library:
//   storage        bytes
//   data           bits
//   work           CPU cycles
//   compute        cycles / second
//   bandwidth      bits / second
//   time           seconds
//   money          dollars; rates are dollars / second
//
// External conversions (decimal prefixes, month = 730 hours):
//   GB    = 1e9 bytes            Mb   = 1e6 bits         Mbps = 1e6 bits/s
//   GHz   = 1e9 cycles/s         Mcycles = 1e6 cycles    ms   = 1e-3 s
//   $/GB/month      -> $/byte/s         divide by 1e9 * 730 * 3600
//   $/GHz/hour      -> $/(cycle/s)/s    divide by 1e9 * 3600
//   $/(Mbps * hour) -> $/bit            divide by 1e6 * 3600
//   $/(rqt/s)/hour  -> $/request        divide by 3600
//
// Every conversion is a single multiplication or a single division by an
// integer-valued double, so it is correctly rounded. `from_canonical` picks
// the external value whose conversion reproduces the canonical value
// bit-for-bit, which makes load -> save -> load value-identical.

#pragma once

#include <cmath>
#include <limits>

namespace mecbend::units {

inline constexpr double kHoursPerMonth = 730.0;
inline constexpr double kSecondsPerHour = 3600.0;

// canonical = external * mul / div, with exactly one of mul/div != 1.
struct Unit {
  double mul = 1.0;
  double div = 1.0;

  constexpr double to_canonical(double external) const {
    return mul != 1.0 ? external * mul : external / div;
  }

  double from_canonical(double canonical) const {
    if (!std::isfinite(canonical)) return canonical;
    double guess = mul != 1.0 ? canonical / mul : canonical * div;
    if (to_canonical(guess) == canonical) return guess;
    // Walk a few ulps in both directions; the exact preimage exists for any
    // value that was produced by to_canonical.
    double up = guess;
    double down = guess;
    for (int i = 0; i < 8; ++i) {
      up = std::nextafter(up, std::numeric_limits<double>::infinity());
      if (to_canonical(up) == canonical) return up;
      down = std::nextafter(down, -std::numeric_limits<double>::infinity());
      if (to_canonical(down) == canonical) return down;
    }
    return guess;
  }
};

inline constexpr Unit kGigabyte{1e9, 1.0};
inline constexpr Unit kMegabit{1e6, 1.0};
inline constexpr Unit kMbps{1e6, 1.0};
inline constexpr Unit kGHz{1e9, 1.0};
inline constexpr Unit kMegacycles{1e6, 1.0};
inline constexpr Unit kMillisecond{1.0, 1e3};
inline constexpr Unit kPerGbMonth{1.0, 1e9 * kHoursPerMonth * kSecondsPerHour};
inline constexpr Unit kPerGhzHour{1.0, 1e9 * kSecondsPerHour};
inline constexpr Unit kPerMbpsHour{1.0, 1e6 * kSecondsPerHour};
inline constexpr Unit kPerRpsHour{1.0, kSecondsPerHour};
inline constexpr Unit kIdentity{1.0, 1.0};

}  // namespace mecbend::units
