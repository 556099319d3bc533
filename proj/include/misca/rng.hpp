// Copyright 2026 The misca Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace misca {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a key.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
  return mix64(parent ^ mix64(key + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) keyed by (seed, run, step, vertex). Stateless, so
/// the value drawn for a given site never depends on thread scheduling.
double counter_uniform(std::uint64_t seed, std::uint64_t run, std::uint64_t step,
                       std::uint64_t vertex) noexcept;

/// 53-bit uniform double in [0, 1) from a 64-bit engine.
inline double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, bound) by rejection; portable across standard
/// libraries, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

/// FNV-1a, used for spec hashes and cell keys.
std::uint64_t fnv1a64(const void* data, std::size_t size) noexcept;

}  // namespace misca
