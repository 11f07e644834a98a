#include "fspq/frog_star.hpp"

namespace fspq {

namespace {

BytesView lab(const char* s) {
  return {reinterpret_cast<const uint8_t*>(s), std::char_traits<char>::length(s)};
}

}  // namespace

FrogStarParams FrogStarParams::from_iterations(uint32_t k) {
  if (k > 6) throw Error("iterated product depth capped at six, capacity saturates there");
  FrogStarParams p;
  p.iterations = k;
  p.capacity = 2;
  for (uint32_t i = 0; i < k; ++i)
    p.capacity = p.capacity > UINT32_MAX ? UINT64_MAX : p.capacity * p.capacity;
  return p;
}

FrogStarParams FrogStarParams::for_capacity(uint64_t periods) {
  if (periods == 0) throw Error("capacity must be positive");
  for (uint32_t k = 0;; ++k) {
    FrogStarParams p = from_iterations(k);
    if (p.capacity >= periods) return p;
  }
}

size_t frog_star_sig_formula(const SchemeDescriptor& d) {
  return 2 * d.sig_size + 4 * d.pk_size + kSeedSize;
}

size_t frog_star_sk_formula(const SchemeDescriptor& d, uint32_t iterations) {
  const size_t log_t = size_t{1} << iterations;
  // the trailing factor is the log of the 128-bit security level
  return iterations * (2 * d.sk_size + 6 * d.pk_size + 4 * kSeedSize) +
         kSeedSize * log_t * log_t + d.sk_size * 7;
}

SchemeBlueprint FrogStarSigner::blueprint(const CompositionContext& ctx, uint32_t iterations) {
  SchemeBlueprint bp = sum_blueprint(ctx, leaf_blueprint(ctx), leaf_blueprint(ctx));
  for (uint32_t i = 0; i < iterations; ++i) {
    SchemeBlueprint upper = bp;
    SchemeBlueprint lower = bp;
    bp = product_blueprint(ctx, std::move(upper), std::move(lower), /*lazy_lower=*/true);
  }
  return bp;
}

FrogStarSigner::FrogStarSigner(FrogStarParams params, CompositionContext ctx)
    : params_(params), ctx_(std::move(ctx)) {}

FrogStarSigner::FrogStarSigner(const FrogStarParams& params, std::shared_ptr<BaseScheme> base,
                               HashSuite suite, const Seed& master, CostCounters* counters)
    : params_(params) {
  if (!base) throw Error("base scheme required");
  ctx_.base = std::move(base);
  ctx_.suite = suite;
  ctx_.counters = counters;
  if (counters != nullptr) {
    counters->prf_count += 2;
    ++counters->hash_count;
  }
  Seed salt = prf_derive(suite, master, lab("star/p"));
  ctx_.pub_seed = hash(suite, tag::kPrf, salt.view());
  Seed root_seed = prf_derive(suite, master, lab("star/r"));
  root_ = blueprint(ctx_, params_.iterations).make(root_seed, kRootPid);
}

Bytes FrogStarSigner::sign(BytesView message) {
  return composite_sign_message(*root_, ctx_, wire_kind::kFrogStar, message);
}

Bytes FrogStarSigner::serialize_state() const {
  ByteWriter w;
  w.u8(kWireVersion);
  w.u8(wire_kind::kFrogStar);
  w.u8(base_scheme_wire_id(ctx_.base->descriptor().name));
  w.u8(static_cast<uint8_t>(ctx_.suite));
  w.u8(static_cast<uint8_t>(params_.iterations));
  w.raw(ctx_.pub_seed.view());
  w.u64(period());
  root_->serialize_state(w);
  return w.take();
}

FrogStarSigner FrogStarSigner::restore(BytesView state, CostCounters* counters) {
  try {
    ByteReader r(state);
    if (r.u8() != kWireVersion) throw VersionMismatch("unsupported state version");
    if (r.u8() != wire_kind::kFrogStar) throw CorruptState("not an iterated product state");
    std::string base_name = base_scheme_from_wire_id(r.u8());
    const uint8_t suite_id = r.u8();
    if (suite_id != static_cast<uint8_t>(HashSuite::Sha256) &&
        suite_id != static_cast<uint8_t>(HashSuite::Shake256))
      throw CorruptState("unknown hash suite");
    FrogStarParams params = FrogStarParams::from_iterations(r.u8());
    CompositionContext ctx;
    ctx.base = make_base_scheme(base_name);
    ctx.suite = static_cast<HashSuite>(suite_id);
    ctx.pub_seed = Digest::from(r.bytes(kDigestSize));
    ctx.counters = counters;
    const uint64_t period = r.u64();
    FrogStarSigner s(params, ctx);
    s.root_ = blueprint(s.ctx_, params.iterations).restore(r, kRootPid);
    if (!r.finished()) throw CorruptState("trailing octets in state");
    if (s.root_->period() != period) throw CorruptState("period does not match structure");
    return s;
  } catch (const ParseError&) {
    throw CorruptState("truncated iterated product state");
  }
}

bool frog_star_verify(const Digest& pk, BytesView message, BytesView signature,
                      CostCounters* cc) {
  if (signature.size() < 2 || signature[1] != wire_kind::kFrogStar) return false;
  return composite_verify(pk, message, signature, cc);
}

}  // namespace fspq
