//------------------------------------------------------------------------------
//
//   Copyright 2026 The siot-trust Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace siot {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used only to derive independent seeds; the streams
// themselves come from Rng.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of child stream `index` under `parent`. Children are independent of
/// how many siblings exist, so adding runs never perturbs earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept
{
  return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed)
{
  return Rng{seed};
}

inline double uniform01(Rng &rng)
{
  return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

inline double uniform(Rng &rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>{lo, hi}(rng);
}

// Always consumes exactly one draw so that streams stay aligned across
// scenarios that differ only in probabilities.
inline bool bernoulli(Rng &rng, double p)
{
  return uniform01(rng) < p;
}

}  // namespace siot
