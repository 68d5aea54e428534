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

#ifndef DHSA_COMMON_BYTES_H_
#define DHSA_COMMON_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dhsa {

using Bytes = std::vector<std::uint8_t>;

// Little-endian append-only encoder.
class ByteWriter {
 public:
  void PutU8(std::uint8_t v) { out_.push_back(v); }
  void PutU16(std::uint16_t v) { PutLe(v, 2); }
  void PutU32(std::uint32_t v) { PutLe(v, 4); }
  void PutU64(std::uint64_t v) { PutLe(v, 8); }
  void PutBytes(std::span<const std::uint8_t> b) {
    out_.insert(out_.end(), b.begin(), b.end());
  }

  // Appends `values`, each truncated to `width` bits (1..64), as one
  // contiguous little-endian bitstream padded to a whole byte.
  void PutPacked(std::span<const std::uint64_t> values, int width);

  void Reserve(std::size_t n) { out_.reserve(out_.size() + n); }
  std::size_t size() const { return out_.size(); }
  Bytes Take() { return std::move(out_); }

 private:
  void PutLe(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes out_;
};

// Bounds-checked decoder; throws ProtocolError on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t GetU8() { return static_cast<std::uint8_t>(GetLe(1)); }
  std::uint16_t GetU16() { return static_cast<std::uint16_t>(GetLe(2)); }
  std::uint32_t GetU32() { return static_cast<std::uint32_t>(GetLe(4)); }
  std::uint64_t GetU64() { return GetLe(8); }
  std::span<const std::uint8_t> GetBytes(std::size_t n);

  // Inverse of ByteWriter::PutPacked.
  std::vector<std::uint64_t> GetPacked(std::size_t count, int width);
  void GetPackedInto(std::span<std::uint64_t> out, int width);

  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::uint64_t GetLe(int n);

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Number of bytes PutPacked emits for `count` values of `width` bits.
constexpr std::size_t PackedSize(std::size_t count, int width) {
  return (count * static_cast<std::size_t>(width) + 7) / 8;
}

std::string ToHex(std::span<const std::uint8_t> bytes);

}  // namespace dhsa

#endif  // DHSA_COMMON_BYTES_H_
