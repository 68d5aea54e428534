/*
 * Copyright 2026 The DHSA Authors.
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

#ifndef DHSA_COMMON_PRNG_H_
#define DHSA_COMMON_PRNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace dhsa {

using Seed32 = std::array<std::uint8_t, 32>;

// SHA-256 of `label` appended to `parent`. Used to derive independent child
// seeds (per party, per run) from one master seed.
Seed32 DeriveSeed(const Seed32& parent, std::string_view label);

// Expands a 64-bit user seed into a 32-byte master seed.
Seed32 SeedFromInt(std::uint64_t value);

// Deterministic pseudorandom generator: AES-128 in counter mode keyed by the
// first half of the seed, with the second half as the initial counter block.
// Satisfies the UniformRandomBitGenerator concept.
class Prng {
 public:
  using result_type = std::uint64_t;

  explicit Prng(const Seed32& seed);
  ~Prng();
  Prng(Prng&&) noexcept;
  Prng& operator=(Prng&&) noexcept;
  Prng(const Prng&) = delete;
  Prng& operator=(const Prng&) = delete;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return Next64(); }

  std::uint64_t Next64();

  // Uniform in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t UniformBelow(std::uint64_t bound);

  // Uniform 128-bit value in [0, bound); bound must be nonzero.
  unsigned __int128 UniformBelow128(unsigned __int128 bound);

  // Uniform double in [0, 1) with 53 bits of precision.
  double UniformUnit();

  void Fill(std::span<std::uint8_t> out);

 private:
  void Refill();

  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
};

// Keystream of AES-128-CTR starting at an arbitrary 16-byte block index.
// Used for random-access derivation of large public matrices.
class CounterStream {
 public:
  CounterStream(const std::array<std::uint8_t, 16>& key,
                unsigned __int128 first_block);
  ~CounterStream();
  CounterStream(const CounterStream&) = delete;
  CounterStream& operator=(const CounterStream&) = delete;

  void Fill(std::span<std::uint8_t> out);

 private:
  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
};

}  // namespace dhsa

#endif  // DHSA_COMMON_PRNG_H_
