// Copyright 2026 The Loom Authors
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
// Binary wire format: a versioned header carrying (N, level, scale),
// then length-prefixed little-endian u64 coefficient arrays per residue.
// Deterministic, so fixed-seed runs serialize bit-exactly.

#pragma once

#include <cstring>
#include <string>
#include <vector>

#include "loom/ckks.hpp"
#include "loom/errors.hpp"

namespace loom {

enum class WireTag : uint8_t {
  kRingPoly = 1,
  kPlaintext = 2,
  kCiphertext = 3,
  kPublicKey = 4,
  kKswKey = 5,
  kRotationKeys = 6,
  kBootShare = 7,
};

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  void u64v(u64 v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
  }
  void f64(double v) {
    u64 bits;
    std::memcpy(&bits, &v, 8);
    u64v(bits);
  }
  void bytes(const std::vector<uint8_t>& b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<uint8_t>& buf) : buf_(buf) {}
  uint8_t u8() { return buf_.at(pos_++); }
  uint16_t u16() {
    uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= uint16_t(u8()) << (8 * i);
    return v;
  }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
    return v;
  }
  u64 u64v() {
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= u64(u8()) << (8 * i);
    return v;
  }
  double f64() {
    u64 bits = u64v();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  const std::vector<uint8_t>& buf_;
  size_t pos_ = 0;
};

inline void write_header(ByteWriter& w, WireTag tag, size_t n, int level,
                         double scale) {
  w.u8('L');
  w.u8('O');
  w.u8('O');
  w.u8('M');
  w.u16(1);  // format version
  w.u8(uint8_t(tag));
  w.u32(uint32_t(n));
  w.u32(uint32_t(level));
  w.f64(scale);
}

struct WireHeader {
  WireTag tag;
  size_t n;
  int level;
  double scale;
};

inline WireHeader read_header(ByteReader& r) {
  if (r.u8() != 'L' || r.u8() != 'O' || r.u8() != 'O' || r.u8() != 'M')
    throw UsageError("bad wire magic");
  if (r.u16() != 1) throw UsageError("unsupported wire version");
  WireHeader h;
  h.tag = WireTag(r.u8());
  h.n = r.u32();
  h.level = int(r.u32());
  h.scale = r.f64();
  return h;
}

inline void write_poly_body(ByteWriter& w, const RingPoly& p) {
  w.u8(p.ntt ? 1 : 0);
  w.u8(p.extended ? 1 : 0);
  w.u32(uint32_t(p.level));
  w.u32(uint32_t(p.residues.size()));
  for (const auto& res : p.residues) {
    w.u64v(res.size());
    for (u64 x : res) w.u64v(x);
  }
}

inline RingPoly read_poly_body(ByteReader& r) {
  RingPoly p;
  p.ntt = r.u8() != 0;
  p.extended = r.u8() != 0;
  p.level = int(r.u32());
  const uint32_t nres = r.u32();
  p.residues.resize(nres);
  for (auto& res : p.residues) {
    res.resize(r.u64v());
    for (u64& x : res) x = r.u64v();
  }
  return p;
}

inline std::vector<uint8_t> serialize(const Ciphertext& ct, size_t n) {
  ByteWriter w;
  write_header(w, WireTag::kCiphertext, n, ct.level(), ct.scale);
  w.u8(uint8_t(ct.size()));
  for (const auto& p : ct.polys) write_poly_body(w, p);
  return w.take();
}

inline Ciphertext deserialize_ciphertext(const std::vector<uint8_t>& buf) {
  ByteReader r(buf);
  WireHeader h = read_header(r);
  if (h.tag != WireTag::kCiphertext) throw UsageError("not a ciphertext");
  Ciphertext ct;
  ct.scale = h.scale;
  const uint8_t sz = r.u8();
  for (uint8_t i = 0; i < sz; ++i) ct.polys.push_back(read_poly_body(r));
  return ct;
}

inline std::vector<uint8_t> serialize(const Plaintext& pt, size_t n) {
  ByteWriter w;
  write_header(w, WireTag::kPlaintext, n, pt.level(), pt.scale);
  write_poly_body(w, pt.poly);
  return w.take();
}

inline Plaintext deserialize_plaintext(const std::vector<uint8_t>& buf) {
  ByteReader r(buf);
  WireHeader h = read_header(r);
  if (h.tag != WireTag::kPlaintext) throw UsageError("not a plaintext");
  Plaintext pt;
  pt.scale = h.scale;
  pt.poly = read_poly_body(r);
  return pt;
}

inline std::vector<uint8_t> serialize(const PublicKey& pk, size_t n) {
  ByteWriter w;
  write_header(w, WireTag::kPublicKey, n, pk.p0.level, 1.0);
  write_poly_body(w, pk.p0);
  write_poly_body(w, pk.p1);
  return w.take();
}

inline PublicKey deserialize_public_key(const std::vector<uint8_t>& buf) {
  ByteReader r(buf);
  WireHeader h = read_header(r);
  if (h.tag != WireTag::kPublicKey) throw UsageError("not a public key");
  PublicKey pk;
  pk.p0 = read_poly_body(r);
  pk.p1 = read_poly_body(r);
  return pk;
}

inline std::vector<uint8_t> serialize(const KswKey& k, size_t n) {
  ByteWriter w;
  write_header(w, WireTag::kKswKey, n, k.empty() ? 0 : k.k0[0].level, 1.0);
  w.u32(uint32_t(k.k0.size()));
  for (size_t d = 0; d < k.k0.size(); ++d) {
    write_poly_body(w, k.k0[d]);
    write_poly_body(w, k.k1[d]);
  }
  return w.take();
}

inline KswKey deserialize_ksw_key(const std::vector<uint8_t>& buf) {
  ByteReader r(buf);
  WireHeader h = read_header(r);
  if (h.tag != WireTag::kKswKey) throw UsageError("not a ksw key");
  KswKey k;
  const uint32_t nd = r.u32();
  for (uint32_t d = 0; d < nd; ++d) {
    k.k0.push_back(read_poly_body(r));
    k.k1.push_back(read_poly_body(r));
  }
  return k;
}

inline std::vector<uint8_t> serialize(const RotationKeySet& rks, size_t n) {
  ByteWriter w;
  write_header(w, WireTag::kRotationKeys, n, 0, 1.0);
  w.u32(uint32_t(rks.by_galois.size()));
  for (const auto& [g, key] : rks.by_galois) {
    w.u64v(g);
    const auto kb = serialize(key, n);
    w.u64v(kb.size());
    w.bytes(kb);
  }
  return w.take();
}

inline RotationKeySet deserialize_rotation_keys(const std::vector<uint8_t>& buf) {
  ByteReader r(buf);
  WireHeader h = read_header(r);
  if (h.tag != WireTag::kRotationKeys) throw UsageError("not rotation keys");
  RotationKeySet rks;
  const uint32_t cnt = r.u32();
  for (uint32_t i = 0; i < cnt; ++i) {
    const u64 g = r.u64v();
    std::vector<uint8_t> kb(r.u64v());
    for (auto& b : kb) b = r.u8();
    rks.by_galois.emplace(g, deserialize_ksw_key(kb));
  }
  return rks;
}

}  // namespace loom
