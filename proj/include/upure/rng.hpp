// Copyright 2026 The UPure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <random>

namespace upure {

using Rng = std::mt19937_64;

// Independent stream for item `ordinal` of a run seeded with `seed`. The
// stream depends only on the pair, never on scheduling.
inline Rng stream_for(std::uint64_t seed, std::uint64_t ordinal) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(ordinal), static_cast<std::uint32_t>(ordinal >> 32),
                    0x55505552u};
  return Rng(seq);
}

// Ordinal reserved for run-level draws (e.g. picking which images to poison).
inline constexpr std::uint64_t kRunLevelOrdinal = ~std::uint64_t{0};

}  // namespace upure
