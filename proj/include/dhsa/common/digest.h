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


#ifndef DHSA_COMMON_DIGEST_H_
#define DHSA_COMMON_DIGEST_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>

namespace dhsa {

using Digest32 = std::array<std::uint8_t, 32>;

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;

  void Update(std::span<const std::uint8_t> data);
  void UpdateU64(std::uint64_t v);
  // Digest of everything so far; the hasher stays usable.
  Digest32 Peek() const;

  static Digest32 Of(std::span<const std::uint8_t> data);

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

}  // namespace dhsa

#endif  // DHSA_COMMON_DIGEST_H_
