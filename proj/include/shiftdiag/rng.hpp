#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The shiftdiag Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace shiftdiag {

/**
 * Seedable 64-bit generator used for every random choice in the library.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are not portable across library
 * implementations, so bounded integers (Lemire's multiply-shift with
 * rejection), uniform doubles (top 53 bits) and normal deviates (Box-Muller,
 * both outputs consumed in order) are derived here from raw engine output.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal deviate.
  double normal();

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items)
  {
    for (std::size_t i = items.size(); i > 1; --i)
    {
      auto j = static_cast<std::size_t>(uniform_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  bool   has_spare_{false};
  double spare_{0.0};
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Combine a seed with a value into a new, well-mixed seed.
std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value);

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace shiftdiag
