#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "fspq/base_scheme.hpp"
#include "fspq/compositions.hpp"

namespace fspq {

// Forward-secure signatures from a two-layer certification structure: an
// upper tree of L one-time leaves where leaf i certifies a lower tree of
// height i. Periods sweep the lower trees in order (tree 0 first), so the
// structure holds 2^L - 1 one-time periods behind a single 32-octet public
// key. Keygen touches two leaves; each signing period pays a bounded number
// of base-scheme operations because upcoming trees are staged incrementally,
// two leaves per signature.
struct FrogParams {
  uint32_t tree_count = 0;        // L, number of lower trees
  uint32_t upper_height = 0;      // ceil(log2 L); upper tree is padded to 2^h leaves
  uint32_t max_lower_height = 0;  // tallest lower tree, L - 1
  uint64_t capacity = 0;          // 2^L - 1, saturated at 2^64 - 1

  static FrogParams from_tree_count(uint32_t count);
  // Smallest instance covering `periods` signatures.
  static FrogParams for_capacity(uint64_t periods);
};

struct FrogPeriod {
  uint32_t tree = 0;
  uint64_t leaf = 0;
};
FrogPeriod frog_locate(uint64_t period);

// Fixed signature length for an instance; every signature is zero-padded to
// this length and verification rejects nonzero padding.
size_t frog_signature_size(const FrogParams& params, const SchemeDescriptor& base);

struct FrogOptions {
  // Stage two leaves of the next tree per signature (bounded per-period
  // cost). Off, the whole next tree is built at turnover; exists to
  // demonstrate the cost cliff in tests and benchmarks.
  bool amortized_staging = true;
};

class FrogSigner {
 public:
  FrogSigner(const FrogParams& params, std::shared_ptr<BaseScheme> base, HashSuite suite,
             const Seed& master, CostCounters* counters = nullptr, FrogOptions options = {});

  // Rebuild a signer from serialize_state output. The counters pointer is
  // fresh; options are not persisted.
  static FrogSigner restore(BytesView state, CostCounters* counters = nullptr,
                            FrogOptions options = {});

  const FrogParams& params() const { return params_; }
  HashSuite suite() const { return suite_; }
  const BaseScheme& base() const { return *base_; }
  Digest public_key() const { return root_; }
  uint64_t period() const { return period_; }
  bool exhausted() const { return period_ >= params_.capacity; }

  // Sign at the current period and advance. Sequential only; throws
  // Exhausted once capacity is spent.
  Bytes sign(BytesView message);

  // Complete resumable state, secrets included. Plaintext: storage is the
  // caller's responsibility (see state_store).
  Bytes serialize_state() const;
  // Every secret octet currently held, for forward-security audits.
  void serialize_secrets(ByteWriter& out) const;

 private:
  struct LowerTree {
    uint32_t height = 0;
    Digest root;
    std::vector<std::vector<Digest>> nodes;  // pair-node levels, level 0 pairs two leaf pks
    std::map<uint64_t, BaseKeyPair> buffer;  // retained keypairs for the first leaves
    uint64_t next_leaf = 0;
    std::vector<std::optional<Seed>> pending;  // right-sibling seeds along the path
    std::optional<Seed> cur_seed;
    std::optional<Bytes> retained_pk;  // even leaf's pk, consumed by the odd sibling
  };
  struct Staging {
    uint32_t height = 0;
    std::optional<Seed> root_seed;  // kept until turnover seeds the signing walk
    uint64_t cursor = 0;            // leaves materialized so far
    std::vector<std::optional<Seed>> pending;
    std::optional<Seed> cur_seed;
    std::vector<std::vector<Digest>> nodes;
    std::vector<uint64_t> filled;  // digests present per node level
    std::map<uint64_t, BaseKeyPair> buffer;
    std::optional<Bytes> pk_pending;  // even leaf pk awaiting its partner
    bool complete = false;
    Digest root;
  };

  FrogSigner(FrogParams params, std::shared_ptr<BaseScheme> base, HashSuite suite,
             CostCounters* counters, FrogOptions options);

  Digest shash(uint8_t t, std::initializer_list<BytesView> parts) const;
  Seed sderive(const Seed& s, const char* label) const;
  Bytes leaf_public(const Seed& s, const ChainAddress& addr) const;
  BaseKeyPair leaf_keygen(const Seed& s, const ChainAddress& addr) const;

  void init_staging(uint32_t tree_index);
  void stage_leaves(uint64_t n);
  void turnover(uint32_t tree_index);
  void ensure_cert();
  void advance_walk(LowerTree& t);

  FrogParams params_;
  std::shared_ptr<BaseScheme> base_;
  HashSuite suite_;
  CostCounters* counters_ = nullptr;
  FrogOptions options_;

  Digest pub_seed_;
  Digest root_;  // public key, the upper tree root
  uint64_t period_ = 0;

  // upper tree
  std::optional<Seed> upper_head_;  // seed chain over upper leaves
  uint32_t upper_head_index_ = 0;
  std::optional<BaseKeyPair> upper_kp_;  // materialized, not yet spent on a certification
  std::optional<Bytes> retained_upper_pk_;
  std::vector<std::vector<Digest>> upper_nodes_;
  std::optional<Bytes> cert_record_;  // cached for the active tree's whole life

  // lower chain and trees
  std::optional<Seed> lower_head_;  // seed chain over lower-tree roots
  uint32_t lower_head_index_ = 0;
  uint32_t active_index_ = 0;
  LowerTree active_;
  std::optional<Staging> staging_;
};

// Stateless; everything needed is carried in the signature. Exactly two
// base-scheme verifications per call.
bool frog_verify(const Digest& pk, BytesView message, BytesView signature,
                 CostCounters* cc = nullptr);

}  // namespace fspq
