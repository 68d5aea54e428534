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

#include "dhsa/common/prng.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace dhsa {

namespace {

constexpr std::size_t kBufferBytes = 4096;

EVP_CIPHER_CTX* NewCtrContext(const std::uint8_t* key, const std::uint8_t* iv) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr ||
      EVP_EncryptInit_ex(ctx, EVP_aes_128_ctr(), nullptr, key, iv) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw std::runtime_error("failed to initialise AES-128-CTR");
  }
  return ctx;
}

void Keystream(EVP_CIPHER_CTX* ctx, std::span<std::uint8_t> out) {
  // Encrypting zeros yields the raw keystream.
  std::memset(out.data(), 0, out.size());
  std::size_t done = 0;
  while (done < out.size()) {
    int chunk = static_cast<int>(std::min<std::size_t>(out.size() - done, 1 << 30));
    int written = 0;
    if (EVP_EncryptUpdate(ctx, out.data() + done, &written, out.data() + done,
                          chunk) != 1) {
      throw std::runtime_error("AES-128-CTR keystream failure");
    }
    done += static_cast<std::size_t>(written);
  }
}

}  // namespace

Seed32 DeriveSeed(const Seed32& parent, std::string_view label) {
  std::vector<std::uint8_t> input(parent.begin(), parent.end());
  input.insert(input.end(), label.begin(), label.end());
  Seed32 out;
  SHA256(input.data(), input.size(), out.data());
  return out;
}

Seed32 SeedFromInt(std::uint64_t value) {
  Seed32 base{};
  for (int i = 0; i < 8; ++i) base[i] = static_cast<std::uint8_t>(value >> (8 * i));
  return DeriveSeed(base, "dhsa/master");
}

struct Prng::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

Prng::Prng(const Seed32& seed)
    : cipher_(std::make_unique<Cipher>()), buffer_(kBufferBytes) {
  cipher_->ctx = NewCtrContext(seed.data(), seed.data() + 16);
  Refill();
}

Prng::~Prng() = default;
Prng::Prng(Prng&&) noexcept = default;
Prng& Prng::operator=(Prng&&) noexcept = default;

void Prng::Refill() {
  Keystream(cipher_->ctx, buffer_);
  pos_ = 0;
}

std::uint64_t Prng::Next64() {
  if (pos_ + 8 > buffer_.size()) Refill();
  std::uint64_t v;
  std::memcpy(&v, buffer_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

std::uint64_t Prng::UniformBelow(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("UniformBelow: zero bound");
  // Lemire's multiply-and-reject.
  unsigned __int128 m = static_cast<unsigned __int128>(Next64()) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(Next64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

unsigned __int128 Prng::UniformBelow128(unsigned __int128 bound) {
  if (bound == 0) throw std::invalid_argument("UniformBelow128: zero bound");
  int bits = 0;
  for (unsigned __int128 b = bound - 1; b != 0; b >>= 1) ++bits;
  const unsigned __int128 mask =
      bits >= 128 ? ~static_cast<unsigned __int128>(0)
                  : (static_cast<unsigned __int128>(1) << bits) - 1;
  for (;;) {
    unsigned __int128 v = (static_cast<unsigned __int128>(Next64()) << 64) | Next64();
    v &= mask;
    if (v < bound) return v;
  }
}

double Prng::UniformUnit() {
  return static_cast<double>(Next64() >> 11) * 0x1.0p-53;
}

void Prng::Fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) Refill();
    std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

struct CounterStream::Cipher {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Cipher() { EVP_CIPHER_CTX_free(ctx); }
};

CounterStream::CounterStream(const std::array<std::uint8_t, 16>& key,
                             unsigned __int128 first_block)
    : cipher_(std::make_unique<Cipher>()) {
  // OpenSSL treats the IV as a big-endian 128-bit counter.
  std::array<std::uint8_t, 16> iv;
  for (int i = 0; i < 16; ++i) {
    iv[15 - i] = static_cast<std::uint8_t>(first_block >> (8 * i));
  }
  cipher_->ctx = NewCtrContext(key.data(), iv.data());
}

CounterStream::~CounterStream() = default;

void CounterStream::Fill(std::span<std::uint8_t> out) { Keystream(cipher_->ctx, out); }

}  // namespace dhsa
