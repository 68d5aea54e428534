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

#include "dhsa/common/bytes.h"

#include <cstring>

#include "dhsa/common/errors.h"

namespace dhsa {

void ByteWriter::PutPacked(std::span<const std::uint64_t> values, int width) {
  if (width < 1 || width > 64) throw InvalidArgument("PutPacked: width out of range");
  const std::uint64_t mask = width == 64 ? ~0ULL : (1ULL << width) - 1;
  const std::size_t start = out_.size();
  const std::size_t size = PackedSize(values.size(), width);
  if (width <= 56) {
    // Flush whole 64-bit words from a 128-bit accumulator.
    out_.resize(start + size + 8);
    std::uint8_t* dst = out_.data() + start;
    std::uint64_t acc = 0;
    int bits = 0;
    for (std::uint64_t v : values) {
      v &= mask;
      acc |= v << bits;
      bits += width;
      if (bits >= 64) {
        std::memcpy(dst, &acc, 8);
        dst += 8;
        bits -= 64;
        // bits < width here, so the shift amount is in [1, 63].
        acc = bits == 0 ? 0 : v >> (width - bits);
      }
    }
    std::memcpy(dst, &acc, 8);
    out_.resize(start + size);
    return;
  }
  unsigned __int128 acc = 0;
  int bits = 0;
  out_.reserve(start + size);
  for (std::uint64_t v : values) {
    acc |= static_cast<unsigned __int128>(v & mask) << bits;
    bits += width;
    while (bits >= 8) {
      out_.push_back(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      bits -= 8;
    }
  }
  if (bits > 0) out_.push_back(static_cast<std::uint8_t>(acc));
}

std::span<const std::uint8_t> ByteReader::GetBytes(std::size_t n) {
  if (remaining() < n) throw ProtocolError("truncated message");
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint64_t ByteReader::GetLe(int n) {
  auto b = GetBytes(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::vector<std::uint64_t> ByteReader::GetPacked(std::size_t count, int width) {
  std::vector<std::uint64_t> out(count);
  GetPackedInto(out, width);
  return out;
}

void ByteReader::GetPackedInto(std::span<std::uint64_t> out, int width) {
  if (width < 1 || width > 64) throw InvalidArgument("GetPacked: width out of range");
  const std::size_t count = out.size();
  auto in = GetBytes(PackedSize(count, width));
  const std::uint64_t mask = width == 64 ? ~0ULL : (1ULL << width) - 1;
  std::size_t k = 0;
  if (width <= 56) {
    const std::size_t w = static_cast<std::size_t>(width);
    for (; k < count && (k * w) / 8 + 8 <= in.size(); ++k) {
      std::uint64_t word;
      std::memcpy(&word, in.data() + (k * w) / 8, 8);
      out[k] = (word >> ((k * w) % 8)) & mask;
    }
  }
  unsigned __int128 acc = 0;
  int bits = 0;
  std::size_t i = (k * static_cast<std::size_t>(width)) / 8;
  const int skip = static_cast<int>((k * static_cast<std::size_t>(width)) % 8);
  if (skip != 0) {
    acc = in[i++] >> skip;
    bits = 8 - skip;
  }
  for (; k < count; ++k) {
    while (bits < width) {
      acc |= static_cast<unsigned __int128>(in[i++]) << bits;
      bits += 8;
    }
    out[k] = static_cast<std::uint64_t>(acc) & mask;
    acc >>= width;
    bits -= width;
  }
}

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

}  // namespace dhsa
