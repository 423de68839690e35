/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "rashaudit/common.hpp"

namespace rashaudit {

// All randomness in the toolkit flows through this generator. The standard
// <random> distributions are implementation-defined, so results would differ
// between standard libraries; splitmix64 plus explicit sampling keeps every
// run byte-reproducible across platforms.

inline constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Order-sensitive combiner for deriving child seeds from a master seed.
inline constexpr std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64_finalize(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// FNV-1a over the bytes of a string, for hashing cell keys by name.
inline constexpr std::uint64_t hash_text(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t seed_combine(std::uint64_t a, std::string_view b) {
  return seed_combine(a, hash_text(b));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_finalize(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, so the distribution is
  /// exact for every n.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) fail(ErrorCode::kInvalidArgument, "next_below(0)");
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform integer in [lo, hi], inclusive on both ends.
  long long next_int(long long lo, long long hi) {
    if (lo > hi) fail(ErrorCode::kInvalidArgument, "next_int: empty range");
    return lo + static_cast<long long>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  double next_real(double lo, double hi) { return lo + next_unit() * (hi - lo); }

  /// Fisher-Yates shuffle driven by next_below.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Random permutation of 0..n-1.
  std::vector<std::uint32_t> permutation(std::size_t n) {
    std::vector<std::uint32_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rashaudit
