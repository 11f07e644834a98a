#include "fspq/hash.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <stdexcept>

namespace fspq {

namespace {

thread_local uint64_t g_primitive_hashes = 0;

struct EvpCtx {
  EVP_MD_CTX* ctx;
  EvpCtx() : ctx(EVP_MD_CTX_new()) {
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  }
  ~EvpCtx() { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* md_for(HashSuite s) {
  switch (s) {
    case HashSuite::Sha256: return EVP_sha256();
    case HashSuite::Shake256: return EVP_shake256();
  }
  throw std::runtime_error("bad hash suite");
}

}  // namespace

const char* suite_name(HashSuite s) {
  switch (s) {
    case HashSuite::Sha256: return "sha256";
    case HashSuite::Shake256: return "shake256";
  }
  return "?";
}

bool suite_from_id(uint8_t id, HashSuite& out) {
  if (id == static_cast<uint8_t>(HashSuite::Sha256)) {
    out = HashSuite::Sha256;
    return true;
  }
  if (id == static_cast<uint8_t>(HashSuite::Shake256)) {
    out = HashSuite::Shake256;
    return true;
  }
  return false;
}

Digest hash(HashSuite suite, uint8_t domain_tag, std::initializer_list<BytesView> parts) {
  ++g_primitive_hashes;
  EvpCtx c;
  if (EVP_DigestInit_ex(c.ctx, md_for(suite), nullptr) != 1)
    throw std::runtime_error("DigestInit failed");
  if (EVP_DigestUpdate(c.ctx, &domain_tag, 1) != 1)
    throw std::runtime_error("DigestUpdate failed");
  for (BytesView p : parts) {
    if (!p.empty() && EVP_DigestUpdate(c.ctx, p.data(), p.size()) != 1)
      throw std::runtime_error("DigestUpdate failed");
  }
  Digest out;
  if (suite == HashSuite::Shake256) {
    if (EVP_DigestFinalXOF(c.ctx, out.bytes.data(), out.bytes.size()) != 1)
      throw std::runtime_error("DigestFinalXOF failed");
  } else {
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(c.ctx, out.bytes.data(), &len) != 1 || len != kDigestSize)
      throw std::runtime_error("DigestFinal failed");
  }
  return out;
}

Seed prf_derive(HashSuite suite, const Seed& seed, BytesView label) {
  Digest d = hash(suite, tag::kPrf, {seed.view(), label});
  Seed out;
  std::memcpy(out.bytes.data(), d.bytes.data(), kSeedSize);
  secure_wipe(d.bytes.data(), d.bytes.size());
  return out;
}

Seed Seed::random() {
  Seed s;
  if (RAND_bytes(s.bytes.data(), static_cast<int>(s.bytes.size())) != 1)
    throw std::runtime_error("RAND_bytes failed");
  return s;
}

uint64_t primitive_hash_count() { return g_primitive_hashes; }

}  // namespace fspq
