#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "fspq/bytes.hpp"

namespace fspq {

// Output width n = 256 bits for both suites; SHAKE-256 is truncated to 32
// octets so digests are interchangeable across suites.
inline constexpr size_t kDigestSize = 32;
// Security parameter kappa = 128 bits.
inline constexpr size_t kSeedSize = 16;

enum class HashSuite : uint8_t {
  Sha256 = 1,
  Shake256 = 2,
};

const char* suite_name(HashSuite s);
bool suite_from_id(uint8_t id, HashSuite& out);

// Domain-separation tags, prepended as a single octet before the payload so
// the same inner primitive never sees colliding input streams across roles.
namespace tag {
inline constexpr uint8_t kMessage = 0x00;   // message digesting
inline constexpr uint8_t kNode = 0x01;      // tree node hashing
inline constexpr uint8_t kPrf = 0x02;       // seed/PRF derivation
inline constexpr uint8_t kCert = 0x03;      // certification payloads
inline constexpr uint8_t kChain = 0x04;     // one-time chain steps
inline constexpr uint8_t kMask = 0x05;      // chain-step masks
inline constexpr uint8_t kIntegrity = 0x06; // state-file integrity
}  // namespace tag

struct Digest {
  std::array<uint8_t, kDigestSize> bytes{};

  BytesView view() const { return {bytes.data(), bytes.size()}; }
  bool operator==(const Digest&) const = default;
  std::string hex() const { return to_hex(view()); }

  static Digest from(BytesView v) {
    if (v.size() != kDigestSize) throw ParseError("digest must be 32 octets");
    Digest d;
    std::memcpy(d.bytes.data(), v.data(), kDigestSize);
    return d;
  }
};

// 128-bit secret seed. Wipes itself on destruction; treat copies with care.
struct Seed {
  std::array<uint8_t, kSeedSize> bytes{};

  Seed() = default;
  ~Seed() { secure_wipe(bytes.data(), bytes.size()); }
  Seed(const Seed&) = default;
  Seed& operator=(const Seed&) = default;

  BytesView view() const { return {bytes.data(), bytes.size()}; }
  bool operator==(const Seed&) const = default;

  static Seed from(BytesView v) {
    if (v.size() != kSeedSize) throw ParseError("seed must be 16 octets");
    Seed s;
    std::memcpy(s.bytes.data(), v.data(), kSeedSize);
    return s;
  }
  static Seed random();
};

// hash(suite, tag, parts...): single-octet tag, then the concatenated parts.
Digest hash(HashSuite suite, uint8_t domain_tag, std::initializer_list<BytesView> parts);
inline Digest hash(HashSuite suite, uint8_t domain_tag, BytesView data) {
  return hash(suite, domain_tag, {data});
}

// Deterministic sub-seed derivation: prf_derive(s, label) = first 16 octets of
// hash(suite, 0x02, s || label). Output never equals the input seed.
Seed prf_derive(HashSuite suite, const Seed& seed, BytesView label);
inline Seed prf_derive(HashSuite suite, const Seed& seed, const std::string& label) {
  return prf_derive(suite, seed, as_view(label));
}

// Running total of primitive hash invocations in this thread (every call into
// the underlying compression functions, including one-time chain steps).
// Purely informational; the audited composition-layer tallies live in
// CostCounters.
uint64_t primitive_hash_count();

}  // namespace fspq
