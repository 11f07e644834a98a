#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fspq/counters.hpp"
#include "fspq/errors.hpp"
#include "fspq/wots.hpp"

namespace fspq {

struct SchemeDescriptor {
  std::string name;
  size_t sig_size = 0;
  size_t pk_size = 0;
  size_t sk_size = 0;
  uint64_t capacity = 1;  // messages a fresh keypair can sign
};

struct BaseKeyPair {
  Bytes sk;
  Bytes pk;
  bool used = false;  // one-time usage flag, enforced by sign
};

// Interface every pluggable one-time signature must satisfy. All operations
// are deterministic functions of their inputs; the optional counters record
// base_keygen / base_sign / base_verify events (pk-only derivation is tallied
// separately, see CostCounters).
class BaseScheme {
 public:
  virtual ~BaseScheme() = default;
  virtual const SchemeDescriptor& descriptor() const = 0;

  BaseKeyPair keygen(const Seed& seed, const Digest& pub_seed, const ChainAddress& addr,
                     CostCounters* cc) const;
  Bytes public_from_seed(const Seed& seed, const Digest& pub_seed, const ChainAddress& addr,
                         CostCounters* cc) const;
  // Throws OneTimeKeyReuse on a second sign with the same keypair.
  Bytes sign(BaseKeyPair& kp, const Digest& message_digest, const Digest& pub_seed,
             const ChainAddress& addr, CostCounters* cc) const;
  // Pure; returns false on any mismatch or malformed length.
  bool verify(BytesView pk, const Digest& message_digest, BytesView sig, const Digest& pub_seed,
              const ChainAddress& addr, CostCounters* cc) const;

 protected:
  virtual BaseKeyPair do_keygen(const Seed&, const Digest&, const ChainAddress&) const = 0;
  virtual Bytes do_public(const Seed&, const Digest&, const ChainAddress&) const = 0;
  virtual Bytes do_sign(const Bytes& sk, const Digest&, const Digest&,
                        const ChainAddress&) const = 0;
  virtual bool do_verify(BytesView pk, const Digest&, BytesView sig, const Digest&,
                         const ChainAddress&) const = 0;
};

class WotsScheme final : public BaseScheme {
 public:
  explicit WotsScheme(HashSuite suite);
  const SchemeDescriptor& descriptor() const override { return desc_; }
  HashSuite suite() const { return suite_; }

 protected:
  BaseKeyPair do_keygen(const Seed&, const Digest&, const ChainAddress&) const override;
  Bytes do_public(const Seed&, const Digest&, const ChainAddress&) const override;
  Bytes do_sign(const Bytes&, const Digest&, const Digest&, const ChainAddress&) const override;
  bool do_verify(BytesView, const Digest&, BytesView, const Digest&,
                 const ChainAddress&) const override;

 private:
  HashSuite suite_;
  WotsParams params_ = kWotsDefault;
  SchemeDescriptor desc_;
};

// Size-faithful stand-ins for lattice schemes, for size/cost modeling only.
// The construction is a keyed-hash expander and is NOT a secure signature:
// anyone holding the public key can forge. Kept behind an explicit opt-in in
// the CLI for exactly that reason.
class MockLatticeScheme final : public BaseScheme {
 public:
  // profile: descriptor sizes to mimic.
  MockLatticeScheme(std::string name, size_t sig_size, size_t pk_size);
  const SchemeDescriptor& descriptor() const override { return desc_; }

 protected:
  BaseKeyPair do_keygen(const Seed&, const Digest&, const ChainAddress&) const override;
  Bytes do_public(const Seed&, const Digest&, const ChainAddress&) const override;
  Bytes do_sign(const Bytes&, const Digest&, const Digest&, const ChainAddress&) const override;
  bool do_verify(BytesView, const Digest&, BytesView, const Digest&,
                 const ChainAddress&) const override;

 private:
  SchemeDescriptor desc_;
};

// Known base schemes: "wots-sha256", "wots-shake256", "mock-dilithium",
// "mock-bliss2". Throws UnknownScheme otherwise.
std::unique_ptr<BaseScheme> make_base_scheme(const std::string& name);
const std::vector<std::string>& base_scheme_names();
bool base_scheme_is_mock(const std::string& name);
// Stable single-octet wire ids for signature/state headers.
uint8_t base_scheme_wire_id(const std::string& name);
std::string base_scheme_from_wire_id(uint8_t id);
// Structural hash suite a composite over this base should use.
HashSuite base_scheme_suite(const std::string& name);

}  // namespace fspq
