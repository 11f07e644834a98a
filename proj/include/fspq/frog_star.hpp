#pragma once

#include "fspq/compositions.hpp"

namespace fspq {

// Iterated product: start from a two-time scheme (a sum of two one-time
// leaves) and square it k times. Capacity grows doubly exponentially
// (2, 4, 16, 256, ...) while key generation stays a handful of base
// operations; the trade is one certification layer per squaring in every
// signature and during verification.
struct FrogStarParams {
  uint32_t iterations = 0;  // number of squarings applied to the two-time base
  uint64_t capacity = 0;    // 2^(2^iterations), saturating at six squarings

  static FrogStarParams from_iterations(uint32_t k);
  // Smallest iteration count whose capacity covers `periods`.
  static FrogStarParams for_capacity(uint64_t periods);
};

// Catalogued accounting rows for per-signature and at-rest sizes, evaluated
// for a base scheme (seeds are 16 octets). The measured wire additionally
// carries framing and one record per layer; size reports show both.
size_t frog_star_sig_formula(const SchemeDescriptor& d);
size_t frog_star_sk_formula(const SchemeDescriptor& d, uint32_t iterations);

// Stateful signer over the iterated product. Sequential signing only: each
// signature consumes the next period and spent secrets are erased. The
// public key is a single 32-octet digest.
class FrogStarSigner {
 public:
  FrogStarSigner(const FrogStarParams& params, std::shared_ptr<BaseScheme> base, HashSuite suite,
                 const Seed& master, CostCounters* counters = nullptr);

  // Rebuilds a signer from serialize_state output. Pure deserialization;
  // spent periods are not recoverable from the stream.
  static FrogStarSigner restore(BytesView state, CostCounters* counters = nullptr);

  const FrogStarParams& params() const { return params_; }
  const BaseScheme& base() const { return *ctx_.base; }
  HashSuite suite() const { return ctx_.suite; }
  Digest public_key() const { return root_->public_key(); }
  uint64_t period() const { return root_->period(); }
  bool exhausted() const { return root_->exhausted(); }

  Bytes sign(BytesView message);

  // Plaintext evolved state, secrets included; callers handle it like a
  // private key.
  Bytes serialize_state() const;
  // Every secret octet currently held, for the forward-security audits.
  void serialize_secrets(ByteWriter& out) const { root_->serialize_secrets(out); }

 private:
  FrogStarSigner(FrogStarParams params, CompositionContext ctx);
  static SchemeBlueprint blueprint(const CompositionContext& ctx, uint32_t iterations);

  FrogStarParams params_;
  CompositionContext ctx_;
  std::unique_ptr<EvolvingScheme> root_;
};

bool frog_star_verify(const Digest& pk, BytesView message, BytesView signature,
                      CostCounters* cc = nullptr);

}  // namespace fspq
