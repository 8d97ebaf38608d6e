//
// Copyright 2026 The lattice-dp Authors.
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
//

#ifndef LATTICE_DP_RANDOM_H_
#define LATTICE_DP_RANDOM_H_

#include <cstdint>
#include <random>

namespace lattice_dp {

// Every chain owns one of these. mt19937_64 output is fully specified by the
// standard, so streams are reproducible across platforms given the seed.
using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits. Written out instead of using
// std::uniform_real_distribution, whose algorithm is implementation-defined.
template <typename Urbg>
inline double Uniform01(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// SplitMix64 finalizer; derives well-separated child seeds from a base seed.
inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_RANDOM_H_
