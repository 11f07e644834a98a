#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "fspq/base_scheme.hpp"

namespace fspq {

// Composition building blocks: sum (capacities add), iterated sum (a binary
// certification tree), and product (upper instances certify fresh lower
// instances; capacities multiply). Each yields an EvolvingScheme whose
// signing periods advance strictly forward, with spent secrets erased.

inline constexpr uint8_t kWireVersion = 1;

namespace wire_kind {
inline constexpr uint8_t kSum = 0x10;
inline constexpr uint8_t kIterSum = 0x11;
inline constexpr uint8_t kProduct = 0x12;
inline constexpr uint8_t kFrog = 0x20;
inline constexpr uint8_t kFrogStar = 0x21;
}  // namespace wire_kind

// Record types inside a composite signature. Records run outermost to
// innermost; a verifier folds them back into the root digest.
namespace wire_rec {
inline constexpr uint8_t kLeaf = 0x01;  // [sig][pk]
inline constexpr uint8_t kSum = 0x02;   // [side][sibling capacity u64][sibling digest]
inline constexpr uint8_t kPath = 0x03;  // [height][leaf index u64][sig][pk][height digests]
inline constexpr uint8_t kCert = 0x04;  // [lower cap u64][upper period u64][lower pk digest]
                                        // [inner record count][inner records]
}  // namespace wire_rec

// Structure-tree position ids, reconstructed by the verifier so every hash
// chain is bound to its place. Root is 1; sum children extend the path;
// product lower instances get a collision-free id from (parent, ordinal).
inline constexpr uint64_t kRootPid = 1;
inline uint64_t sum_child_pid(uint64_t pid, int side) { return 2 * pid + uint64_t(side); }
inline uint64_t product_upper_pid(uint64_t pid) { return 2 * pid; }
uint64_t product_lower_pid(HashSuite suite, uint64_t pid, uint64_t ordinal);

// Shared plumbing one composition family threads through all its nodes.
struct CompositionContext {
  std::shared_ptr<BaseScheme> base;
  HashSuite suite = HashSuite::Sha256;
  Digest pub_seed;                  // public salt, carried in every signature
  CostCounters* counters = nullptr; // optional tallies, not owned
};

class EvolvingScheme {
 public:
  virtual ~EvolvingScheme() = default;
  virtual uint64_t capacity() const = 0;
  // Next period to be signed; equal to capacity once exhausted.
  virtual uint64_t period() const = 0;
  bool exhausted() const { return period() >= capacity(); }
  virtual Digest public_key() const = 0;
  // Sign `target` at the current period, append this scheme's framed records
  // to `out`, bump `record_count`, and advance. Throws Exhausted.
  virtual void append_signature(const Digest& target, ByteWriter& out, uint8_t& record_count) = 0;
  // Burn the current period without producing a signature.
  virtual void skip() = 0;
  // Every secret octet currently held (seeds and private keys), for the
  // forward-security audits. Not a load format.
  virtual void serialize_secrets(ByteWriter& out) const = 0;
  // Full evolved state, loadable through SchemeBlueprint::restore. Holds the
  // current secrets and public scaffolding; spent periods are not recoverable
  // from it, which is the point.
  virtual void serialize_state(ByteWriter& out) const = 0;
};

// A blueprint builds one node of the composition structure: `make` installs
// a signing-ready instance (eager base keygen for the active leaf), while
// `derive_pk` computes only the public digest (tallied as pk derivations,
// never as keygens - nothing secret is retained).
struct SchemeBlueprint {
  uint64_t capacity = 0;  // saturates at UINT64_MAX for unreachably large composites
  std::function<std::unique_ptr<EvolvingScheme>(const Seed&, uint64_t pid)> make;
  std::function<Digest(const Seed&, uint64_t pid)> derive_pk;
  // Rebuilds an instance from serialize_state output. Pure deserialization:
  // no base-scheme calls, no counter movement. Throws CorruptState.
  std::function<std::unique_ptr<EvolvingScheme>(ByteReader&, uint64_t pid)> restore;
};

SchemeBlueprint leaf_blueprint(CompositionContext ctx);
SchemeBlueprint sum_blueprint(CompositionContext ctx, SchemeBlueprint left, SchemeBlueprint right);
// Iterated sum: 2^height one-time leaves under one root, compact path records.
SchemeBlueprint tree_blueprint(CompositionContext ctx, uint32_t height);
// Product: upper certifies lower instances drawn from a per-ordinal seed
// chain. With lazy_lower the lower instance is not materialized at keygen;
// only its public digest is derived (the certification still happens).
SchemeBlueprint product_blueprint(CompositionContext ctx, SchemeBlueprint upper,
                                  SchemeBlueprint lower, bool lazy_lower = false);

// Wire format, bit-exact:
//   [version u8][kind u8][base id u8][suite id u8][pub seed 32]
//   [period u64 LE][record count u8][records...]
// every record u32-length-framed; cert records nest the upper scheme's
// records the same way.
Bytes composite_sign_message(EvolvingScheme& scheme, const CompositionContext& ctx, uint8_t kind,
                             BytesView message);
// Sign at an explicit period: earlier periods raise PeriodPassed, later ones
// burn the gap, past capacity raises Exhausted.
Bytes composite_sign_message_at(EvolvingScheme& scheme, const CompositionContext& ctx,
                                uint8_t kind, uint64_t period, BytesView message);

// Pure: depends only on (pk, message, wire). Counts base verifies and
// structural hashes into cc when given.
bool composite_verify(const Digest& pk, BytesView message, BytesView wire,
                      CostCounters* cc = nullptr);

// Parsed shape of a composite signature, for audits and tooling.
struct CompositeSummary {
  uint8_t version = 0;
  uint8_t kind = 0;
  std::string base_name;
  HashSuite suite = HashSuite::Sha256;
  uint64_t period = 0;
  size_t cert_records = 0;
  size_t sum_records = 0;
  size_t leaf_records = 0;  // leaf + path records, nested certs included
  size_t total_records = 0; // top-level records only
};
CompositeSummary composite_inspect(BytesView wire);

}  // namespace fspq
