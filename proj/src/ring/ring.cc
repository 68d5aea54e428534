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

#include "dhsa/ring/ring.h"

#include <algorithm>
#include <bit>
#include <sstream>

#include "dhsa/common/errors.h"

namespace dhsa::ring {

namespace {

constexpr std::uint64_t kDefaultPrimes[] = {36028797018652673ULL,
                                            18014398509309953ULL};

std::uint64_t ShoupQuotient(std::uint64_t w, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / p);
}

// x * w mod p given w_shoup = floor(w * 2^64 / p); p < 2^63.
inline std::uint64_t MulShoup(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup,
                              std::uint64_t p) {
  std::uint64_t q = static_cast<std::uint64_t>((static_cast<u128>(x) * w_shoup) >> 64);
  std::uint64_t r = x * w - q * p;
  return r >= p ? r - p : r;
}

// Same without the final correction; result in [0, 2p).
inline std::uint64_t MulShoupLazy(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup,
                                  std::uint64_t p) {
  std::uint64_t q = static_cast<std::uint64_t>((static_cast<u128>(x) * w_shoup) >> 64);
  return x * w - q * p;
}

inline std::uint64_t AddModP(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}

inline std::uint64_t SubModP(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + p - b;
}

std::size_t BitReverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

std::uint64_t InvMod(std::uint64_t a, std::uint64_t p) { return PowMod(a, p - 2, p); }

NttTables BuildTables(std::size_t n, int log_n, std::uint64_t p) {
  // Smallest primitive 2n-th root of unity reachable as g^((p-1)/2n).
  const std::uint64_t order = 2 * n;
  std::uint64_t psi = 0;
  for (std::uint64_t g = 2; g < p; ++g) {
    std::uint64_t c = PowMod(g, (p - 1) / order, p);
    if (PowMod(c, n, p) == p - 1) {
      psi = c;
      break;
    }
  }
  if (psi == 0) throw InvalidArgument("no primitive 2n-th root of unity");
  const std::uint64_t psi_inv = InvMod(psi, p);

  NttTables t;
  t.prime = p;
  t.roots.resize(n);
  t.inv_roots.resize(n);
  t.roots_shoup.resize(n);
  t.inv_roots_shoup.resize(n);
  std::uint64_t pw = 1, ipw = 1;
  std::vector<std::uint64_t> powers(n), inv_powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    powers[i] = pw;
    inv_powers[i] = ipw;
    pw = MulMod(pw, psi, p);
    ipw = MulMod(ipw, psi_inv, p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = BitReverse(i, log_n);
    t.roots[i] = powers[r];
    t.inv_roots[i] = inv_powers[r];
    t.roots_shoup[i] = ShoupQuotient(t.roots[i], p);
    t.inv_roots_shoup[i] = ShoupQuotient(t.inv_roots[i], p);
  }
  t.n_inv = InvMod(static_cast<std::uint64_t>(n % p), p);
  t.n_inv_shoup = ShoupQuotient(t.n_inv, p);
  t.bits = std::bit_width(p);
  t.barrett = static_cast<std::uint64_t>((static_cast<u128>(1) << (2 * t.bits)) / p);
  t.two64_mod = static_cast<std::uint64_t>((static_cast<u128>(1) << 64) % p);
  return t;
}

void CheckCompatible(const RingElement& a, const RingElement& b) {
  if (!a.params() || !b.params()) throw InvalidArgument("uninitialised ring element");
  if (a.params() != b.params() && !a.params()->SameAs(*b.params())) {
    throw InvalidArgument("ring parameter mismatch: " + a.params()->Describe() +
                          " vs " + b.params()->Describe());
  }
  if (a.domain() != b.domain()) throw InvalidArgument("ring element domain mismatch");
}

}  // namespace

std::uint64_t MulMod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t PowMod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) r = MulMod(r, base, m);
    base = MulMod(base, base, m);
    exp >>= 1;
  }
  return r;
}

bool IsPrime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::string U128ToString(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::shared_ptr<const RingParams> RingParams::Create(std::size_t n,
                                                     std::vector<std::uint64_t> primes,
                                                     int log_t) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw InvalidArgument("ring degree must be a power of two >= 2");
  }
  if (primes.empty() || primes.size() > 2) {
    throw InvalidArgument("ring modulus must consist of one or two primes");
  }
  if (primes.size() == 2 && primes[0] == primes[1]) {
    throw InvalidArgument("ring primes must be distinct");
  }
  auto params = std::shared_ptr<RingParams>(new RingParams());
  params->n_ = n;
  params->log_n_ = std::countr_zero(n);
  params->q_ = 1;
  for (std::uint64_t p : primes) {
    if (p >= (1ULL << 62) || !IsPrime(p)) {
      throw InvalidArgument("ring modulus " + std::to_string(p) + " is not a prime below 2^62");
    }
    if ((p - 1) % (2 * n) != 0) {
      throw InvalidArgument("prime " + std::to_string(p) + " is not 1 mod 2n");
    }
    params->prime_bits_.push_back(std::bit_width(p));
    params->ntt_.push_back(BuildTables(n, params->log_n_, p));
    params->q_ *= p;
  }
  params->primes_ = std::move(primes);
  for (u128 v = params->q_; v != 0; v >>= 1) ++params->q_bits_;
  if (log_t < 1 || log_t > 64 || (static_cast<u128>(1) << log_t) >= params->q_) {
    throw InvalidArgument("plaintext modulus must be 2^k with 1 <= k <= 64 and t < q");
  }
  params->log_t_ = log_t;
  params->delta_ = params->q_ >> log_t;
  if (params->primes_.size() == 2) {
    params->crt_inv_ = InvMod(params->primes_[0] % params->primes_[1], params->primes_[1]);
  }
  return params;
}

std::shared_ptr<const RingParams> RingParams::Default() {
  static const auto kDefault =
      Create(4096, {kDefaultPrimes[0], kDefaultPrimes[1]}, /*log_t=*/64);
  return kDefault;
}

bool RingParams::SameAs(const RingParams& other) const {
  return n_ == other.n_ && primes_ == other.primes_ && log_t_ == other.log_t_;
}

std::string RingParams::Describe() const {
  std::ostringstream os;
  os << "n=" << n_ << " q=";
  for (std::size_t i = 0; i < primes_.size(); ++i) os << (i ? "*" : "") << primes_[i];
  os << " t=2^" << log_t_;
  return os.str();
}

// Harvey butterflies: values stay in [0, 4p) between layers.
void RingParams::ForwardNtt(std::size_t i, std::span<std::uint64_t> a) const {
  const NttTables& tb = ntt_[i];
  const std::uint64_t p = tb.prime;
  const std::uint64_t two_p = 2 * p;
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t k = 0; k < m; ++k) {
      const std::uint64_t w = tb.roots[m + k];
      const std::uint64_t ws = tb.roots_shoup[m + k];
      std::uint64_t* __restrict x = a.data() + 2 * k * t;
      std::uint64_t* __restrict y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        std::uint64_t u = x[j];
        u = u >= two_p ? u - two_p : u;
        const std::uint64_t v = MulShoupLazy(y[j], w, ws, p);
        x[j] = u + v;
        y[j] = u - v + two_p;
      }
    }
  }
  for (auto& v : a) {
    v = v >= two_p ? v - two_p : v;
    v = v >= p ? v - p : v;
  }
}

// Values stay in [0, 2p) between layers.
void RingParams::InverseNtt(std::size_t i, std::span<std::uint64_t> a) const {
  const NttTables& tb = ntt_[i];
  const std::uint64_t p = tb.prime;
  const std::uint64_t two_p = 2 * p;
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    for (std::size_t k = 0; k < h; ++k) {
      const std::uint64_t w = tb.inv_roots[h + k];
      const std::uint64_t ws = tb.inv_roots_shoup[h + k];
      std::uint64_t* __restrict x = a.data() + 2 * k * t;
      std::uint64_t* __restrict y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const std::uint64_t u = x[j];
        const std::uint64_t v = y[j];
        const std::uint64_t s = u + v;
        x[j] = s >= two_p ? s - two_p : s;
        y[j] = MulShoupLazy(u - v + two_p, w, ws, p);
      }
    }
    t <<= 1;
  }
  for (auto& v : a) v = MulShoup(v, tb.n_inv, tb.n_inv_shoup, p);
}

u128 RingParams::Reconstruct(std::uint64_t r0, std::uint64_t r1) const {
  if (primes_.size() == 1) return r0;
  const std::uint64_t p0 = primes_[0], p1 = primes_[1];
  // x = r0 + p0 * ((r1 - r0) * p0^{-1} mod p1)
  std::uint64_t diff = SubModP(r1 % p1, r0 % p1, p1);
  std::uint64_t k = ntt_[1].MulMod(diff, crt_inv_);
  return static_cast<u128>(r0) + static_cast<u128>(p0) * k;
}

RingElement::RingElement(RingParamsPtr params, Domain domain)
    : params_(std::move(params)), domain_(domain) {
  if (!params_) throw InvalidArgument("null ring parameters");
  data_.assign(params_->n() * params_->num_primes(), 0);
}

RingElement RingElement::FromSigned(RingParamsPtr params,
                                    std::span<const std::int64_t> coeffs) {
  RingElement r(std::move(params));
  if (coeffs.size() != r.n()) throw InvalidArgument("coefficient count must equal n");
  for (std::size_t i = 0; i < r.params_->num_primes(); ++i) {
    const std::int64_t p = static_cast<std::int64_t>(r.params_->primes()[i]);
    auto res = r.residues(i);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      std::int64_t v = coeffs[j];
      if (v <= -p || v >= p) v %= p;
      res[j] = static_cast<std::uint64_t>(v < 0 ? v + p : v);
    }
  }
  return r;
}

RingElement RingElement::FromWide(RingParamsPtr params, std::span<const u128> coeffs) {
  RingElement r(std::move(params));
  if (coeffs.size() != r.n()) throw InvalidArgument("coefficient count must equal n");
  for (std::size_t i = 0; i < r.params_->num_primes(); ++i) {
    const NttTables& tb = r.params_->ntt(i);
    auto res = r.residues(i);
    for (std::size_t j = 0; j < coeffs.size(); ++j) res[j] = tb.ReduceWide(coeffs[j]);
  }
  return r;
}

void RingElement::ConvertTo(Domain domain) {
  if (domain == domain_) return;
  for (std::size_t i = 0; i < params_->num_primes(); ++i) {
    if (domain == Domain::kNtt) {
      params_->ForwardNtt(i, residues(i));
    } else {
      params_->InverseNtt(i, residues(i));
    }
  }
  domain_ = domain;
}

RingElement RingElement::ToNtt() const {
  RingElement r = *this;
  r.ConvertTo(Domain::kNtt);
  return r;
}

RingElement RingElement::ToCoefficient() const {
  RingElement r = *this;
  r.ConvertTo(Domain::kCoefficient);
  return r;
}

bool RingElement::operator==(const RingElement& other) const {
  if (!params_ || !other.params_) return params_ == other.params_;
  return params_->SameAs(*other.params_) && domain_ == other.domain_ &&
         data_ == other.data_;
}

RingElement Add(const RingElement& a, const RingElement& b) {
  RingElement r = a;
  AddInPlace(r, b);
  return r;
}

void AddInPlace(RingElement& acc, const RingElement& b) {
  CheckCompatible(acc, b);
  for (std::size_t i = 0; i < acc.params()->num_primes(); ++i) {
    const std::uint64_t p = acc.params()->primes()[i];
    auto x = acc.residues(i);
    auto y = b.residues(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = AddModP(x[j], y[j], p);
  }
}

RingElement Sub(const RingElement& a, const RingElement& b) {
  CheckCompatible(a, b);
  RingElement r = a;
  for (std::size_t i = 0; i < r.params()->num_primes(); ++i) {
    const std::uint64_t p = r.params()->primes()[i];
    auto x = r.residues(i);
    auto y = b.residues(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = SubModP(x[j], y[j], p);
  }
  return r;
}

RingElement Negate(const RingElement& a) {
  RingElement r = a;
  for (std::size_t i = 0; i < r.params()->num_primes(); ++i) {
    const std::uint64_t p = r.params()->primes()[i];
    for (auto& v : r.residues(i)) v = v == 0 ? 0 : p - v;
  }
  return r;
}

RingElement NegacyclicMul(const RingElement& a, const RingElement& b) {
  if (!a.params() || !b.params()) throw InvalidArgument("uninitialised ring element");
  if (a.params() != b.params() && !a.params()->SameAs(*b.params())) {
    throw InvalidArgument("ring parameter mismatch: " + a.params()->Describe() +
                          " vs " + b.params()->Describe());
  }
  const bool both_ntt = a.domain() == Domain::kNtt && b.domain() == Domain::kNtt;
  RingElement x = a.domain() == Domain::kNtt ? a : a.ToNtt();
  const RingElement* y = &b;
  RingElement b_ntt;
  if (b.domain() != Domain::kNtt) {
    b_ntt = b.ToNtt();
    y = &b_ntt;
  }
  for (std::size_t i = 0; i < x.params()->num_primes(); ++i) {
    const NttTables& tb = x.params()->ntt(i);
    auto xs = x.residues(i);
    auto ys = y->residues(i);
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = tb.MulMod(xs[j], ys[j]);
  }
  if (!both_ntt) x.ConvertTo(Domain::kCoefficient);
  return x;
}

RingElement MulScalar(const RingElement& a, u128 scalar) {
  RingElement r = a;
  for (std::size_t i = 0; i < r.params()->num_primes(); ++i) {
    const std::uint64_t p = r.params()->primes()[i];
    const std::uint64_t s = static_cast<std::uint64_t>(scalar % p);
    const std::uint64_t s_shoup = ShoupQuotient(s, p);
    for (auto& v : r.residues(i)) v = MulShoup(v, s, s_shoup, p);
  }
  return r;
}

std::vector<u128> CrtLift(const RingElement& a) {
  if (a.domain() != Domain::kCoefficient) {
    throw InvalidArgument("CrtLift requires the coefficient domain");
  }
  const RingParams& params = *a.params();
  std::vector<u128> out(a.n());
  auto r0 = a.residues(0);
  if (params.num_primes() == 1) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = r0[j];
    return out;
  }
  auto r1 = a.residues(1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = params.Reconstruct(r0[j], r1[j]);
  return out;
}

std::vector<i128> CenteredLift(const RingElement& a) {
  const u128 q = a.params()->q();
  std::vector<u128> lifted = CrtLift(a);
  std::vector<i128> out(lifted.size());
  for (std::size_t j = 0; j < lifted.size(); ++j) {
    out[j] = lifted[j] > q / 2 ? -static_cast<i128>(q - lifted[j])
                               : static_cast<i128>(lifted[j]);
  }
  return out;
}

void Serialize(const RingElement& a, ByteWriter& out) {
  const RingParams& params = *a.params();
  out.PutU32(static_cast<std::uint32_t>(params.n()));
  out.PutU8(static_cast<std::uint8_t>(params.num_primes()));
  out.PutU8(static_cast<std::uint8_t>(a.domain()));
  for (std::size_t i = 0; i < params.num_primes(); ++i) {
    out.PutPacked(a.residues(i), params.prime_bits(i));
  }
}

RingElement Deserialize(const RingParamsPtr& params, ByteReader& in) {
  const std::uint32_t n = in.GetU32();
  const std::uint8_t count = in.GetU8();
  const std::uint8_t domain = in.GetU8();
  if (n != params->n() || count != params->num_primes() || domain > 1) {
    throw ProtocolError("ring element header does not match parameters");
  }
  RingElement r(params, static_cast<Domain>(domain));
  for (std::size_t i = 0; i < count; ++i) {
    std::span<std::uint64_t> v = r.residues(i);
    in.GetPackedInto(v, params->prime_bits(i));
    const std::uint64_t p = params->primes()[i];
    std::uint64_t bad = 0;
    for (std::uint64_t x : v) bad |= static_cast<std::uint64_t>(x >= p);
    if (bad != 0) throw ProtocolError("ring residue out of range");
  }
  return r;
}

std::size_t SerializedSize(const RingParams& params) {
  std::size_t size = 6;
  for (std::size_t i = 0; i < params.num_primes(); ++i) {
    size += PackedSize(params.n(), params.prime_bits(i));
  }
  return size;
}

}  // namespace dhsa::ring
