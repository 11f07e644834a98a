#include "fspq/wots.hpp"

#include <cstring>

#include "fspq/errors.hpp"

namespace fspq {

void ChainAddress::encode(uint8_t* out, uint16_t chain, uint8_t step) const {
  out[0] = domain;
  put_u64_le(out + 1, tree);
  put_u64_le(out + 9, leaf);
  out[17] = static_cast<uint8_t>(chain);
  out[18] = static_cast<uint8_t>(chain >> 8);
  out[19] = step;
}

Digest wots_chain(HashSuite suite, const WotsParams& params, const Digest& x, uint32_t start,
                  uint32_t steps, const Digest& pub_seed, const ChainAddress& addr,
                  uint16_t chain_index) {
  if (start + steps > params.w - 1) throw Error("chain walk past w-1");
  Digest y = x;
  uint8_t a[ChainAddress::kEncodedSize];
  for (uint32_t k = start; k < start + steps; ++k) {
    addr.encode(a, chain_index, static_cast<uint8_t>(k));
    BytesView av{a, sizeof a};
    Digest mask = hash(suite, tag::kMask, {pub_seed.view(), av});
    Digest mixed;
    for (size_t i = 0; i < kDigestSize; ++i) mixed.bytes[i] = y.bytes[i] ^ mask.bytes[i];
    y = hash(suite, tag::kChain, {pub_seed.view(), av, mixed.view()});
  }
  return y;
}

std::vector<uint8_t> wots_encode(const WotsParams& params, const Digest& message_digest) {
  const uint32_t lg = params.log_w();
  std::vector<uint8_t> symbols;
  symbols.reserve(params.len());

  // len1 message symbols, MSB first within each octet.
  uint32_t bits_taken = 0;
  for (uint32_t i = 0; i < params.len1(); ++i) {
    uint32_t bit = bits_taken % 8;
    uint8_t byte = message_digest.bytes[bits_taken / 8];
    symbols.push_back(static_cast<uint8_t>((byte >> (8 - lg - bit)) & (params.w - 1)));
    bits_taken += lg;
  }

  uint32_t checksum = 0;
  for (uint32_t i = 0; i < params.len1(); ++i) checksum += (params.w - 1) - symbols[i];

  // Checksum appended big-endian, base w, len2 symbols.
  for (uint32_t i = 0; i < params.len2(); ++i) {
    uint32_t shift = lg * (params.len2() - 1 - i);
    symbols.push_back(static_cast<uint8_t>((checksum >> shift) & (params.w - 1)));
  }
  return symbols;
}

WotsKeyPair wots_keygen(HashSuite suite, const WotsParams& params, const Seed& leaf_seed,
                        const Digest& pub_seed, const ChainAddress& addr) {
  WotsKeyPair kp;
  kp.sk.resize(params.len());
  kp.pk.resize(params.len());
  uint8_t a[ChainAddress::kEncodedSize];
  for (uint32_t j = 0; j < params.len(); ++j) {
    addr.encode(a, static_cast<uint16_t>(j), 0xff);  // step 0xff marks sk derivation
    kp.sk[j] = hash(suite, tag::kPrf, {leaf_seed.view(), BytesView{a, sizeof a}});
    kp.pk[j] = wots_chain(suite, params, kp.sk[j], 0, params.w - 1, pub_seed, addr,
                          static_cast<uint16_t>(j));
  }
  return kp;
}

std::vector<Digest> wots_public_from_seed(HashSuite suite, const WotsParams& params,
                                          const Seed& leaf_seed, const Digest& pub_seed,
                                          const ChainAddress& addr) {
  WotsKeyPair kp = wots_keygen(suite, params, leaf_seed, pub_seed, addr);
  for (Digest& d : kp.sk) secure_wipe(d.bytes.data(), d.bytes.size());
  return std::move(kp.pk);
}

std::vector<Digest> wots_sign(HashSuite suite, const WotsParams& params,
                              const std::vector<Digest>& sk, const Digest& message_digest,
                              const Digest& pub_seed, const ChainAddress& addr) {
  if (sk.size() != params.len()) throw Error("wots sk has wrong length");
  std::vector<uint8_t> symbols = wots_encode(params, message_digest);
  std::vector<Digest> sig(params.len());
  for (uint32_t j = 0; j < params.len(); ++j)
    sig[j] = wots_chain(suite, params, sk[j], 0, symbols[j], pub_seed, addr,
                        static_cast<uint16_t>(j));
  return sig;
}

bool wots_verify(HashSuite suite, const WotsParams& params, const std::vector<Digest>& pk,
                 const Digest& message_digest, const std::vector<Digest>& sig,
                 const Digest& pub_seed, const ChainAddress& addr) {
  if (pk.size() != params.len() || sig.size() != params.len()) return false;
  std::vector<uint8_t> symbols = wots_encode(params, message_digest);
  for (uint32_t j = 0; j < params.len(); ++j) {
    Digest end = wots_chain(suite, params, sig[j], symbols[j], params.w - 1 - symbols[j],
                            pub_seed, addr, static_cast<uint16_t>(j));
    if (!(end == pk[j])) return false;
  }
  return true;
}

Bytes wots_serialize_elements(const std::vector<Digest>& elems) {
  Bytes out;
  out.reserve(elems.size() * kDigestSize);
  for (const Digest& d : elems) out.insert(out.end(), d.bytes.begin(), d.bytes.end());
  return out;
}

std::vector<Digest> wots_parse_elements(const WotsParams& params, BytesView data) {
  if (data.size() != params.element_bytes()) throw ParseError("wots element block length");
  std::vector<Digest> out(params.len());
  for (uint32_t j = 0; j < params.len(); ++j)
    std::memcpy(out[j].bytes.data(), data.data() + size_t(j) * kDigestSize, kDigestSize);
  return out;
}

}  // namespace fspq
