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

#ifndef DHSA_RING_RING_H_
#define DHSA_RING_RING_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dhsa/common/bytes.h"

namespace dhsa::ring {

using u128 = unsigned __int128;
using i128 = __int128;

// Root-of-unity tables for the negacyclic NTT modulo one prime. Powers of the
// primitive 2n-th root are stored in bit-reversed order together with their
// Shoup quotients floor(w * 2^64 / prime).
struct NttTables {
  std::uint64_t prime = 0;
  std::vector<std::uint64_t> roots;
  std::vector<std::uint64_t> roots_shoup;
  std::vector<std::uint64_t> inv_roots;
  std::vector<std::uint64_t> inv_roots_shoup;
  std::uint64_t n_inv = 0;
  std::uint64_t n_inv_shoup = 0;
  // Barrett constant floor(2^(2k) / prime) with k = bit width of prime.
  std::uint64_t barrett = 0;
  std::uint64_t two64_mod = 0;
  int bits = 0;

  // x mod prime for x < 2^(2 * bits).
  std::uint64_t Reduce(unsigned __int128 x) const {
    const std::uint64_t hi = static_cast<std::uint64_t>(x >> (bits - 1));
    const std::uint64_t q = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(hi) * barrett) >> (bits + 1));
    std::uint64_t r = static_cast<std::uint64_t>(x) - q * prime;
    r = r >= prime ? r - prime : r;
    return r >= prime ? r - prime : r;
  }

  // x mod prime for any 128-bit x.
  std::uint64_t ReduceWide(unsigned __int128 x) const {
    const std::uint64_t hi = Reduce(static_cast<std::uint64_t>(x >> 64));
    const std::uint64_t lo = Reduce(static_cast<std::uint64_t>(x));
    return Reduce(static_cast<unsigned __int128>(hi) * two64_mod + lo);
  }

  // a * b mod prime for a, b < prime.
  std::uint64_t MulMod(std::uint64_t a, std::uint64_t b) const {
    return Reduce(static_cast<unsigned __int128>(a) * b);
  }
};

// Parameters of R_q = Z[X]/(X^n + 1) with q given as a product of one or two
// NTT-friendly primes, plus the power-of-two plaintext modulus t = 2^log_t.
class RingParams {
 public:
  // Throws InvalidArgument if n is not a power of two, a prime is not
  // 1 mod 2n (or not prime), there are not 1 or 2 primes, or log_t is not in
  // [1, 64] with t < q.
  static std::shared_ptr<const RingParams> Create(std::size_t n,
                                                  std::vector<std::uint64_t> primes,
                                                  int log_t);

  // n = 4096, two primes with a 109-bit product, t = 2^64.
  static std::shared_ptr<const RingParams> Default();

  std::size_t n() const { return n_; }
  int log_n() const { return log_n_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  std::size_t num_primes() const { return primes_.size(); }
  int prime_bits(std::size_t i) const { return prime_bits_[i]; }
  u128 q() const { return q_; }
  int q_bits() const { return q_bits_; }
  int log_t() const { return log_t_; }
  u128 t() const { return static_cast<u128>(1) << log_t_; }
  // floor(q / t).
  u128 delta() const { return delta_; }
  const NttTables& ntt(std::size_t i) const { return ntt_[i]; }

  // Value equality (degree, primes, plaintext modulus).
  bool SameAs(const RingParams& other) const;
  std::string Describe() const;

  // In-place negacyclic transforms of one residue array modulo primes()[i].
  void ForwardNtt(std::size_t i, std::span<std::uint64_t> a) const;
  void InverseNtt(std::size_t i, std::span<std::uint64_t> a) const;

  // CRT reconstruction of one coefficient into [0, q).
  u128 Reconstruct(std::uint64_t r0, std::uint64_t r1) const;

 private:
  RingParams() = default;

  std::size_t n_ = 0;
  int log_n_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<int> prime_bits_;
  std::vector<NttTables> ntt_;
  u128 q_ = 0;
  int q_bits_ = 0;
  int log_t_ = 0;
  u128 delta_ = 0;
  // primes_[0]^{-1} mod primes_[1], when there are two primes.
  std::uint64_t crt_inv_ = 0;
};

using RingParamsPtr = std::shared_ptr<const RingParams>;

enum class Domain : std::uint8_t { kCoefficient = 0, kNtt = 1 };

// An element of R_q in residue-number-system form: one length-n residue array
// per prime, stored prime-major.
class RingElement {
 public:
  RingElement() = default;
  // The zero element.
  RingElement(RingParamsPtr params, Domain domain = Domain::kCoefficient);

  // Coefficients given as signed integers, reduced into each prime.
  static RingElement FromSigned(RingParamsPtr params, std::span<const std::int64_t> coeffs);
  // Coefficients given as integers in [0, q) (reduced if larger).
  static RingElement FromWide(RingParamsPtr params, std::span<const u128> coeffs);

  const RingParamsPtr& params() const { return params_; }
  Domain domain() const { return domain_; }
  std::size_t n() const { return params_->n(); }

  std::span<const std::uint64_t> residues(std::size_t i) const {
    return {data_.data() + i * n(), n()};
  }
  std::span<std::uint64_t> residues(std::size_t i) { return {data_.data() + i * n(), n()}; }

  RingElement ToNtt() const;
  RingElement ToCoefficient() const;
  void ConvertTo(Domain domain);

  bool operator==(const RingElement& other) const;

 private:
  RingParamsPtr params_;
  Domain domain_ = Domain::kCoefficient;
  std::vector<std::uint64_t> data_;
};

// Throws InvalidArgument when a and b use different parameters or domains.
RingElement Add(const RingElement& a, const RingElement& b);
RingElement Sub(const RingElement& a, const RingElement& b);
RingElement Negate(const RingElement& a);
void AddInPlace(RingElement& acc, const RingElement& b);

// Product in Z_q[X]/(X^n + 1). The result is in the NTT domain only when both
// inputs are; otherwise it is returned in the coefficient domain.
RingElement NegacyclicMul(const RingElement& a, const RingElement& b);

// Multiplies every coefficient by an integer scalar (reduced mod each prime).
RingElement MulScalar(const RingElement& a, u128 scalar);

// Per-coefficient CRT reconstruction into [0, q). Requires coefficient domain.
std::vector<u128> CrtLift(const RingElement& a);

// CrtLift mapped to the centered range (-q/2, q/2].
std::vector<i128> CenteredLift(const RingElement& a);

// Wire format: n (u32), prime count (u8), domain (u8), then per prime the n
// residues bit-packed at the prime's bit width.
void Serialize(const RingElement& a, ByteWriter& out);
RingElement Deserialize(const RingParamsPtr& params, ByteReader& in);
std::size_t SerializedSize(const RingParams& params);

// Helpers shared with the oracle tests.
std::uint64_t MulMod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t PowMod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
bool IsPrime(std::uint64_t n);
std::string U128ToString(u128 v);

}  // namespace dhsa::ring

#endif  // DHSA_RING_RING_H_
