/*
 * Copyright (c) 2026, the gpe authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>

namespace gpe {

// Deterministic cross-platform RNG: splitmix64 seeding feeding xorshift64*.
// std::mt19937 + std distributions are avoided on purpose: distribution
// output is not pinned by the standard, and model files must replay
// bit-identically on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed + 0x9E3779B97F4A7C15ull)) {
    if (state_ == 0) state_ = 0x4d595df4d0f33173ull;
  }

  // Derived stream for (seed, stream) pairs, e.g. per-tree forest streams.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed) ^ (stream + 1) * 0xBF58476D1CE4E5B9ull);
  }

  std::uint64_t next_u64() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
  }

  // Uniform in [0, bound). Modulo bias is < bound/2^64, irrelevant for the
  // bounds used here (< 2^32), and determinism matters more than the last
  // ulp of uniformity.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; recomputes both values each call so the
  // stream position is a pure function of the call count.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace gpe
