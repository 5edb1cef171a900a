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

#include "shiftdiag/rng.hpp"

#include <cmath>
#include <numbers>

namespace shiftdiag {

std::uint64_t Rng::uniform_below(std::uint64_t bound)
{
  // Lemire, "Fast Random Integer Generation in an Interval" (2019).
  unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound)
  {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold)
    {
      product = static_cast<unsigned __int128>(engine_()) * bound;
      low     = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double Rng::uniform01()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
  if (has_spare_)
  {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0)
  {
    u1 = uniform01();
  }
  double const u2     = uniform01();
  double const radius = std::sqrt(-2.0 * std::log(u1));
  double const angle  = 2.0 * std::numbers::pi * u2;
  spare_              = radius * std::sin(angle);
  has_spare_          = true;
  return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value)
{
  return mix_seed(seed ^ mix_seed(value));
}

std::uint64_t fnv1a(std::string_view bytes)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes)
  {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace shiftdiag
