#include "fspq/base_scheme.hpp"

#include <algorithm>

namespace fspq {

BaseKeyPair BaseScheme::keygen(const Seed& seed, const Digest& pub_seed, const ChainAddress& addr,
                               CostCounters* cc) const {
  if (cc != nullptr) ++cc->base_keygen_count;
  return do_keygen(seed, pub_seed, addr);
}

Bytes BaseScheme::public_from_seed(const Seed& seed, const Digest& pub_seed,
                                   const ChainAddress& addr, CostCounters* cc) const {
  if (cc != nullptr) ++cc->pk_derive_count;
  return do_public(seed, pub_seed, addr);
}

Bytes BaseScheme::sign(BaseKeyPair& kp, const Digest& message_digest, const Digest& pub_seed,
                       const ChainAddress& addr, CostCounters* cc) const {
  if (kp.used && descriptor().capacity == 1) {
    throw OneTimeKeyReuse("one-time key at tree=" + std::to_string(addr.tree) +
                          " leaf=" + std::to_string(addr.leaf) + " already spent");
  }
  kp.used = true;
  if (cc != nullptr) ++cc->base_sign_count;
  Bytes sig = do_sign(kp.sk, message_digest, pub_seed, addr);
  secure_wipe(kp.sk);  // forward security: the secret dies with its single use
  kp.sk.clear();
  return sig;
}

bool BaseScheme::verify(BytesView pk, const Digest& message_digest, BytesView sig,
                        const Digest& pub_seed, const ChainAddress& addr, CostCounters* cc) const {
  if (cc != nullptr) ++cc->base_verify_count;
  if (pk.size() != descriptor().pk_size || sig.size() != descriptor().sig_size) return false;
  return do_verify(pk, message_digest, sig, pub_seed, addr);
}

WotsScheme::WotsScheme(HashSuite suite) : suite_(suite) {
  const size_t elem = params_.element_bytes();
  desc_ = SchemeDescriptor{
      .name = std::string("wots-") + suite_name(suite),
      .sig_size = elem,
      .pk_size = elem,
      .sk_size = elem,
      .capacity = 1,
  };
}

BaseKeyPair WotsScheme::do_keygen(const Seed& seed, const Digest& pub_seed,
                                  const ChainAddress& addr) const {
  WotsKeyPair kp = wots_keygen(suite_, params_, seed, pub_seed, addr);
  BaseKeyPair out;
  out.sk = wots_serialize_elements(kp.sk);
  out.pk = wots_serialize_elements(kp.pk);
  for (auto& d : kp.sk) secure_wipe(d.bytes);
  return out;
}

Bytes WotsScheme::do_public(const Seed& seed, const Digest& pub_seed,
                            const ChainAddress& addr) const {
  std::vector<Digest> pk = wots_public_from_seed(suite_, params_, seed, pub_seed, addr);
  return wots_serialize_elements(pk);
}

Bytes WotsScheme::do_sign(const Bytes& sk, const Digest& message_digest, const Digest& pub_seed,
                          const ChainAddress& addr) const {
  std::vector<Digest> elems = wots_parse_elements(params_, sk);
  std::vector<Digest> sig = wots_sign(suite_, params_, elems, message_digest, pub_seed, addr);
  for (auto& d : elems) secure_wipe(d.bytes);
  return wots_serialize_elements(sig);
}

bool WotsScheme::do_verify(BytesView pk, const Digest& message_digest, BytesView sig,
                           const Digest& pub_seed, const ChainAddress& addr) const {
  std::vector<Digest> pk_elems;
  std::vector<Digest> sig_elems;
  try {
    pk_elems = wots_parse_elements(params_, pk);
    sig_elems = wots_parse_elements(params_, sig);
  } catch (const ParseError&) {
    return false;
  }
  return wots_verify(suite_, params_, pk_elems, message_digest, sig_elems, pub_seed, addr);
}

namespace {

constexpr HashSuite kMockSuite = HashSuite::Sha256;

BytesView lab(const char* s) {
  return {reinterpret_cast<const uint8_t*>(s), std::char_traits<char>::length(s)};
}

Bytes mock_expand(const Digest& root, const char* label, size_t size) {
  Bytes out;
  out.reserve(size);
  uint32_t block = 0;
  while (out.size() < size) {
    uint8_t ctr[4];
    put_u32_le(ctr, block++);
    Digest d = hash(kMockSuite, tag::kChain, {root.view(), lab(label), BytesView(ctr, 4)});
    const size_t take = std::min<size_t>(kDigestSize, size - out.size());
    out.insert(out.end(), d.bytes.begin(), d.bytes.begin() + take);
  }
  return out;
}

Digest mock_secret(const Seed& seed, const ChainAddress& addr) {
  uint8_t a[ChainAddress::kEncodedSize];
  addr.encode(a, 0, 0);
  return hash(kMockSuite, tag::kPrf, {seed.view(), BytesView(a, sizeof a), lab("mock/sk")});
}

Digest mock_commitment(const Digest& sk) {
  return hash(kMockSuite, tag::kPrf, {sk.view(), lab("mock/pk")});
}

Bytes mock_pk_from_commitment(const Digest& c, size_t pk_size) {
  Bytes pk(c.bytes.begin(), c.bytes.end());
  Bytes tail = mock_expand(c, "mock/ex", pk_size - kDigestSize);
  pk.insert(pk.end(), tail.begin(), tail.end());
  return pk;
}

}  // namespace

MockLatticeScheme::MockLatticeScheme(std::string name, size_t sig_size, size_t pk_size) {
  desc_ = SchemeDescriptor{
      .name = std::move(name),
      .sig_size = sig_size,
      .pk_size = pk_size,
      .sk_size = kDigestSize,
      .capacity = 1,
  };
}

BaseKeyPair MockLatticeScheme::do_keygen(const Seed& seed, const Digest&,
                                         const ChainAddress& addr) const {
  Digest sk = mock_secret(seed, addr);
  BaseKeyPair out;
  out.sk.assign(sk.bytes.begin(), sk.bytes.end());
  out.pk = mock_pk_from_commitment(mock_commitment(sk), desc_.pk_size);
  secure_wipe(sk.bytes);
  return out;
}

Bytes MockLatticeScheme::do_public(const Seed& seed, const Digest&,
                                   const ChainAddress& addr) const {
  Digest sk = mock_secret(seed, addr);
  Bytes pk = mock_pk_from_commitment(mock_commitment(sk), desc_.pk_size);
  secure_wipe(sk.bytes);
  return pk;
}

Bytes MockLatticeScheme::do_sign(const Bytes& sk, const Digest& message_digest, const Digest&,
                                 const ChainAddress&) const {
  Digest sk_d = Digest::from(BytesView(sk.data(), sk.size()));
  Digest c = mock_commitment(sk_d);
  // a plays the role of the prover's response, u the challenge binding it to
  // the commitment and message. Verification recomputes u and the filler.
  Digest a = hash(kMockSuite, tag::kPrf, {sk_d.view(), message_digest.view(), lab("mock/rs")});
  Digest u = hash(kMockSuite, tag::kCert, {c.view(), message_digest.view(), a.view()});
  Bytes sig(a.bytes.begin(), a.bytes.end());
  sig.insert(sig.end(), u.bytes.begin(), u.bytes.end());
  Bytes filler = mock_expand(u, "mock/sg", desc_.sig_size - 2 * kDigestSize);
  sig.insert(sig.end(), filler.begin(), filler.end());
  secure_wipe(sk_d.bytes);
  return sig;
}

bool MockLatticeScheme::do_verify(BytesView pk, const Digest& message_digest, BytesView sig,
                                  const Digest&, const ChainAddress&) const {
  Digest c = Digest::from(pk.subspan(0, kDigestSize));
  // The whole pk is a deterministic expansion of its leading commitment;
  // rejecting inconsistent expansions makes every pk bit significant.
  Bytes expect_pk = mock_pk_from_commitment(c, desc_.pk_size);
  if (!std::equal(expect_pk.begin(), expect_pk.end(), pk.begin())) return false;
  Digest a = Digest::from(sig.subspan(0, kDigestSize));
  Digest u = Digest::from(sig.subspan(kDigestSize, kDigestSize));
  Digest u_expect = hash(kMockSuite, tag::kCert, {c.view(), message_digest.view(), a.view()});
  if (!(u == u_expect)) return false;
  Bytes filler = mock_expand(u, "mock/sg", desc_.sig_size - 2 * kDigestSize);
  return std::equal(filler.begin(), filler.end(), sig.begin() + 2 * kDigestSize);
}

std::unique_ptr<BaseScheme> make_base_scheme(const std::string& name) {
  if (name == "wots-sha256") return std::make_unique<WotsScheme>(HashSuite::Sha256);
  if (name == "wots-shake256") return std::make_unique<WotsScheme>(HashSuite::Shake256);
  if (name == "mock-dilithium") return std::make_unique<MockLatticeScheme>(name, 2701, 1472);
  if (name == "mock-bliss2") return std::make_unique<MockLatticeScheme>(name, 625, 875);
  throw UnknownScheme("unknown base scheme: " + name);
}

const std::vector<std::string>& base_scheme_names() {
  static const std::vector<std::string> names{"wots-sha256", "wots-shake256", "mock-dilithium",
                                              "mock-bliss2"};
  return names;
}

bool base_scheme_is_mock(const std::string& name) { return name.rfind("mock-", 0) == 0; }

uint8_t base_scheme_wire_id(const std::string& name) {
  if (name == "wots-sha256") return 0x01;
  if (name == "wots-shake256") return 0x02;
  if (name == "mock-dilithium") return 0x03;
  if (name == "mock-bliss2") return 0x04;
  throw UnknownScheme("unknown base scheme: " + name);
}

std::string base_scheme_from_wire_id(uint8_t id) {
  switch (id) {
    case 0x01: return "wots-sha256";
    case 0x02: return "wots-shake256";
    case 0x03: return "mock-dilithium";
    case 0x04: return "mock-bliss2";
    default: throw UnknownScheme("unknown base scheme id " + std::to_string(id));
  }
}

HashSuite base_scheme_suite(const std::string& name) {
  if (name == "wots-shake256") return HashSuite::Shake256;
  if (name == "wots-sha256" || base_scheme_is_mock(name)) return HashSuite::Sha256;
  throw UnknownScheme("unknown base scheme: " + name);
}

}  // namespace fspq
