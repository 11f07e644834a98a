#pragma once

#include <cstdint>
#include <vector>

#include "fspq/hash.hpp"

namespace fspq {

namespace detail {
constexpr uint32_t floor_log2(uint64_t v) {
  uint32_t r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}
constexpr uint32_t div_ceil(uint32_t a, uint32_t b) { return (a + b - 1) / b; }
// floor(log_w(x)) for w a power of two.
constexpr uint32_t floor_log_w(uint64_t x, uint32_t w) {
  uint32_t r = 0;
  while (x >= w) {
    x /= w;
    ++r;
  }
  return r;
}
}  // namespace detail

// Winternitz parameters. n is pinned to the digest width (256 bits); m is the
// number of message-digest bits consumed by the encoding (256 in production,
// smaller for the brute-force toy checks).
struct WotsParams {
  uint32_t w = 4;
  uint32_t m = 256;

  constexpr uint32_t log_w() const { return detail::floor_log2(w); }
  // message chains: ceil(m / log2 w)
  constexpr uint32_t len1() const { return detail::div_ceil(m, log_w()); }
  // checksum chains: floor(log_w(len1*(w-1))) + 1
  constexpr uint32_t len2() const { return detail::floor_log_w(uint64_t(len1()) * (w - 1), w) + 1; }
  constexpr uint32_t len() const { return len1() + len2(); }
  constexpr uint32_t max_checksum() const { return len1() * (w - 1); }
  // Serialized secret key, public key, and signature all carry len() chain
  // values of one digest each.
  constexpr size_t element_bytes() const { return size_t(len()) * kDigestSize; }

  bool operator==(const WotsParams&) const = default;
};

inline constexpr WotsParams kWotsDefault{4, 256};
inline constexpr WotsParams kWotsToy{4, 4};

// Hash-time address of a chain position. The verifier reconstructs addresses
// from public signature structure, so nothing secret may enter here.
struct ChainAddress {
  uint8_t domain = 0;
  uint64_t tree = 0;
  uint64_t leaf = 0;

  static constexpr size_t kEncodedSize = 20;  // domain|tree|leaf|chain|step
  void encode(uint8_t* out, uint16_t chain, uint8_t step) const;
  bool operator==(const ChainAddress&) const = default;
};

namespace addr_domain {
inline constexpr uint8_t kUpperLeaf = 0;
inline constexpr uint8_t kLowerLeaf = 1;
inline constexpr uint8_t kComposite = 2;
inline constexpr uint8_t kStandalone = 3;
}  // namespace addr_domain

// One mask-then-hash chain walk: applies `steps` iterations starting at
// position `start`. chain(x, a, b) then chain(result, a+b, c) equals
// chain(x, a, b+c); the composition law is what makes sign/verify meet.
Digest wots_chain(HashSuite suite, const WotsParams& params, const Digest& x, uint32_t start,
                  uint32_t steps, const Digest& pub_seed, const ChainAddress& addr,
                  uint16_t chain_index);

// Base-w message encoding: len1 MSB-first symbols from the first m bits of
// the digest, then the checksum sum(w-1 - symbol) in big-endian base w over
// len2 symbols. Increasing any message symbol strictly decreases the
// checksum, so no two encodings are coordinate-wise comparable.
std::vector<uint8_t> wots_encode(const WotsParams& params, const Digest& message_digest);

struct WotsKeyPair {
  std::vector<Digest> sk;  // chain starting points
  std::vector<Digest> pk;  // chain end points (uncompressed public key)
};

// Derive the full keypair for a leaf from its 128-bit seed. Deterministic.
WotsKeyPair wots_keygen(HashSuite suite, const WotsParams& params, const Seed& leaf_seed,
                        const Digest& pub_seed, const ChainAddress& addr);

// Public key only (same derivation, secrets discarded before returning).
std::vector<Digest> wots_public_from_seed(HashSuite suite, const WotsParams& params,
                                          const Seed& leaf_seed, const Digest& pub_seed,
                                          const ChainAddress& addr);

std::vector<Digest> wots_sign(HashSuite suite, const WotsParams& params,
                              const std::vector<Digest>& sk, const Digest& message_digest,
                              const Digest& pub_seed, const ChainAddress& addr);

// Recompute the chain ends from a signature; the caller compares against the
// carried public key. Returns false on malformed lengths.
bool wots_verify(HashSuite suite, const WotsParams& params, const std::vector<Digest>& pk,
                 const Digest& message_digest, const std::vector<Digest>& sig,
                 const Digest& pub_seed, const ChainAddress& addr);

Bytes wots_serialize_elements(const std::vector<Digest>& elems);
std::vector<Digest> wots_parse_elements(const WotsParams& params, BytesView data);

}  // namespace fspq
