#pragma once

#include <variant>

#include "fspq/frog.hpp"
#include "fspq/frog_star.hpp"

namespace fspq {

// One handle over both stateful signer families, keyed by scheme id strings
// of the form "<family>-<base>": "frog-wots-sha256", "frogstar-mock-bliss2",
// and so on. The capacity exponent L requests at least 2^L - 1 signatures;
// the family picks its own matching shape (L trees for the two-level
// construction, the smallest squaring count that covers the target for the
// iterated product).
class StatefulSigner {
 public:
  StatefulSigner(const std::string& scheme_id, uint32_t capacity_exponent, const Seed& master,
                 CostCounters* counters = nullptr);

  // Rebuilds a signer from serialize_payload output; the payload must agree
  // with the scheme id or CorruptState is thrown.
  static StatefulSigner from_payload(const std::string& scheme_id, BytesView payload,
                                     CostCounters* counters = nullptr);

  static const std::vector<std::string>& scheme_ids();
  // True when the base scheme is a structural stand-in with no security.
  static bool scheme_uses_mock(const std::string& scheme_id);

  const std::string& scheme_id() const { return scheme_id_; }
  HashSuite suite() const;
  const BaseScheme& base() const;
  Digest public_key() const;
  uint64_t period() const;
  uint64_t capacity() const;
  bool exhausted() const { return period() >= capacity(); }

  Bytes sign(BytesView message);
  Bytes serialize_payload() const;
  void serialize_secrets(ByteWriter& out) const;

 private:
  StatefulSigner(std::string scheme_id, FrogSigner signer);
  StatefulSigner(std::string scheme_id, FrogStarSigner signer);

  std::string scheme_id_;
  std::variant<FrogSigner, FrogStarSigner> impl_;
};

// Signature wires self-describe their family; verifies accordingly. Pure.
bool any_verify(const Digest& pk, BytesView message, BytesView signature,
                CostCounters* cc = nullptr);

}  // namespace fspq
